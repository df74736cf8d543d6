use tambara::construct::ConstructionRegistry;
use tambara::spectra::{spectrum, CatalogRegistry};
use tambara::transfer::{parse_system, enumerate_compatible_pairs, system_name};

fn main() {
    let creg = ConstructionRegistry::builtin();
    let sreg = CatalogRegistry::builtin();

    // Z-underline over C_p: three spectra (Table 2 shape)
    let d = creg.build_spec("constantZ:p=2", None).unwrap();
    let lat = d.lattice.clone();
    for (om, oa) in [("Otriv","Otriv"), ("Otriv","Ocomp"), ("Ocomp","Ocomp")] {
        let om = parse_system(&lat, om).unwrap();
        let oa = parse_system(&lat, oa).unwrap();
        let t0 = std::time::Instant::now();
        match spectrum(&d, &om, &oa, &sreg) {
            Ok(t) => println!("Zbar C_p ({},{}): {:?}  [{:?}]", t.om_name, t.oa_name, t.family_names(), t0.elapsed()),
            Err(e) => println!("Zbar C_p: ERROR {e}"),
        }
    }

    // Burnside over C_p
    let d = creg.build_spec("burnside:p=2", None).unwrap();
    for (om, oa) in [("Otriv","Otriv"), ("Otriv","Ocomp"), ("Ocomp","Ocomp")] {
        let om = parse_system(&d.lattice, om).unwrap();
        let oa = parse_system(&d.lattice, oa).unwrap();
        match spectrum(&d, &om, &oa, &sreg) {
            Ok(t) => {
                println!("A C_p ({},{}): {:?}", t.om_name, t.oa_name, t.family_names());
                for id in &t.identifications { println!("   id: {} = {} at {}", id.a, id.b, id.stratum); }
            }
            Err(e) => println!("A C_p: ERROR {e}"),
        }
    }

    // All 12 for Z-underline C_{p^2}
    let d = creg.build_spec("constantZ:p=2,n=2", None).unwrap();
    for pair in enumerate_compatible_pairs(&d.lattice) {
        let t0 = std::time::Instant::now();
        match spectrum(&d, &pair.mult, &pair.add, &sreg) {
            Ok(t) => println!("Zbar C4 ({},{}): {:?} [{:?}]", system_name(&pair.mult), system_name(&pair.add), t.families.iter().map(|f| format!("{}{}", f.name, if f.is_full(&t.strata) {""} else {"*"})).collect::<Vec<_>>(), t0.elapsed()),
            Err(e) => println!("Zbar C4 ({},{}): ERROR {e}", system_name(&pair.mult), system_name(&pair.add)),
        }
    }
}

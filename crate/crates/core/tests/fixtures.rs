// SPDX-License-Identifier: Apache-2.0
use std::path::PathBuf;

use netfuzz::liberty::{parse_liberty_with_warnings, write_liberty, CellLibrary};
use netfuzz::mapper::{build_match_index, map_netlist};
use netfuzz::netlist::{elaborate, parse_structural_verilog, write_structural_verilog, ElabError, Netlist};

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn lib(name: &str) -> CellLibrary {
    let parsed = parse_liberty_with_warnings(&fixture(name)).unwrap();
    assert!(parsed.warnings.is_empty(), "{:?}", parsed.warnings);
    parsed.library
}

fn netlist(name: &str) -> Netlist {
    parse_structural_verilog(&fixture(name)).unwrap()
}

#[test]
fn libraries_load_completely() {
    let a = lib("lib45.lib");
    assert_eq!(a.cells.len(), 13);
    assert_eq!(a.cell("AND2X1").unwrap().area, 3.2);
    assert_eq!(a.cell("OR2X1").unwrap().area, 2.35);
    let b = lib("lib45_b.lib");
    assert_eq!(b.cells.len(), 13);
    for l in [&a, &b] {
        let back = netfuzz::liberty::parse_liberty(&write_liberty(l)).unwrap();
        assert_eq!(&back, l);
    }
}

#[test]
fn generic_designs_map_with_both_libraries() {
    for lib_name in ["lib45.lib", "lib45_b.lib"] {
        let l = lib(lib_name);
        let idx = build_match_index(&l);
        for d in ["alu4.v", "or_tree.v", "seq_acc.v", "gates_mix.v"] {
            let n = netlist(d);
            elaborate(&n, None).unwrap();
            let (mapped, report) = map_netlist(&n, &idx).unwrap_or_else(|e| panic!("{d} with {lib_name}: {e}"));
            elaborate(&mapped, Some(&l)).unwrap_or_else(|e| panic!("{d} with {lib_name}: {e}"));
            assert_eq!(report.total_instances, n.instances.len());
        }
    }
}

#[test]
fn mapped_fixtures_elaborate() {
    let l = lib("lib45.lib");
    elaborate(&netlist("listing1.v"), Some(&l)).unwrap();
    let err = elaborate(&netlist("double_driver.v"), Some(&l)).unwrap_err();
    match err {
        ElabError::MultipleDriver { net, drivers } => {
            assert_eq!(net, "d[0]");
            assert_eq!(drivers, ["u_sub0.Y", "u_bypass.Y"]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn netlists_round_trip() {
    for d in ["alu4.v", "or_tree.v", "seq_acc.v", "gates_mix.v", "listing1.v", "double_driver.v"] {
        let n = netlist(d);
        let back = parse_structural_verilog(&write_structural_verilog(&n)).unwrap();
        assert_eq!(back, n, "{d}");
    }
}

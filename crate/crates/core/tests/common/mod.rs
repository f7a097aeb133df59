#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::Rng;
use spillgrid::io::{dump_formula_map, dump_spill_map, dump_values, parse_workbook, save_workbook, write_workbook};
use spillgrid::{CellKey, Workbook};

/// The twelve data rows of the sales extract: region, goods, units, price.
pub const FIGURE_ONE: [(&str, &str, f64, f64); 12] = [
    ("east", "laptops", 1.0, 712.0),
    ("south", "desktops", 1.0, 471.0),
    ("west", "tablets", 1.0, 570.0),
    ("midwest", "software", 4.0, 349.0),
    ("west", "laptops", 1.0, 584.0),
    ("midwest", "servers", 1.0, 1697.0),
    ("south", "software", 1.0, 482.0),
    ("south", "tablets", 2.0, 34.0),
    ("mountain", "tablets", 1.0, 118.0),
    ("west", "tablets", 1.0, 995.0),
    ("midwest", "laptops", 1.0, 622.0),
    ("midwest", "tablets", 1.0, 806.0),
];

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn load(name: &str) -> Workbook {
    spillgrid::io::load_workbook(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Parses workbook text (tables resolve against the fixtures directory) and
/// recalculates it.
pub fn book(text: &str) -> Workbook {
    let mut wb = parse_workbook(text, &fixture("")).unwrap_or_else(|e| panic!("{e}"));
    wb.recalculate_full();
    wb
}

pub fn key(wb: &Workbook, a1: &str) -> CellKey {
    wb.parse_cell_ref(a1).unwrap_or_else(|| panic!("bad reference {a1}"))
}

/// Every dump of every sheet, concatenated.
pub fn dumps(wb: &Workbook) -> String {
    let mut out = String::new();
    for sheet in wb.sheets() {
        out.push_str(&dump_values(wb, &sheet.name).unwrap());
        out.push_str("--\n");
        out.push_str(&dump_formula_map(wb, &sheet.name).unwrap());
        out.push_str("--\n");
    }
    out.push_str(&dump_spill_map(wb));
    out
}

/// A fresh workbook with the same content, recalculated from scratch.
pub fn rebuilt(wb: &Workbook) -> Workbook {
    if wb.tables().is_empty() {
        return book(&write_workbook(wb));
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("book.sg");
    save_workbook(wb, &path).unwrap();
    spillgrid::io::load_workbook(&path).unwrap()
}

fn a1(row: u32, col: u32) -> String {
    format!("{}{row}", (b'A' + (col - 1) as u8) as char)
}

fn cell(rng: &mut impl Rng, size: u32) -> String {
    a1(rng.gen_range(1..=size), rng.gen_range(1..=size))
}

fn rect(rng: &mut impl Rng, size: u32) -> String {
    let r = rng.gen_range(1..=size);
    let c = rng.gen_range(1..=size);
    let r2 = (r + rng.gen_range(0..3)).min(size);
    let c2 = (c + rng.gen_range(0..3)).min(size);
    format!("{}:{}", a1(r, c), a1(r2, c2))
}

/// Random content for one cell of a `size`×`size` grid, as typed by a user.
/// Formulas spill, read spills, read ranges and change shape with their
/// inputs; cycles and blocked spills come up often.
pub fn random_input(rng: &mut impl Rng, size: u32) -> String {
    match rng.gen_range(0..12) {
        0 => String::new(),
        1 => rng.gen_range(0..5).to_string(),
        2 => "x".to_string(),
        3 => format!("=SEQUENCE({},{})", rng.gen_range(1..4), rng.gen_range(1..4)),
        4 => format!("={}+1", cell(rng, size)),
        5 => format!("={}#*2", cell(rng, size)),
        6 => format!("=SUM({})", rect(rng, size)),
        7 => format!("=TRANSPOSE({})", rect(rng, size)),
        8 => format!("={}", rect(rng, size)),
        9 => format!("=IF({}>2,SEQUENCE(2),0)", cell(rng, size)),
        10 => format!("=SEQUENCE(MAX(1,MIN(3,{})))", cell(rng, size)),
        _ => format!("=ISFORMULA({})", rect(rng, size)),
    }
}

/// A random `size`×`size` workbook on one sheet named `S`.
pub fn random_book(rng: &mut impl Rng, size: u32, density: f64) -> Workbook {
    let mut text = String::from("sheet S\n");
    for r in 1..=size {
        for c in 1..=size {
            if rng.gen_bool(density) {
                let input = random_input(rng, size);
                if let Some(f) = input.strip_prefix('=') {
                    text.push_str(&format!("cell {} formula ={f}\n", a1(r, c)));
                } else if !input.is_empty() {
                    text.push_str(&format!("cell {} value {input}\n", a1(r, c)));
                }
            }
        }
    }
    book(&text)
}

/// Applies a random edit and returns the edited cell.
pub fn random_edit(wb: &mut Workbook, rng: &mut impl Rng, size: u32) -> CellKey {
    let at = CellKey::new(0, rng.gen_range(1..=size), rng.gen_range(1..=size));
    let input = random_input(rng, size);
    wb.apply_edit(at, &input).unwrap();
    at
}

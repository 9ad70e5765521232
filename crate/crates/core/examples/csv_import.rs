//! Matches the headers of a hand-made spreadsheet export to catalog
//! columns by edit distance.

use founderrank::catalog::FIRM_COLUMNS;
use founderrank::search::guess_column_mapping;

fn main() {
    let headers: Vec<String> = ["Firm ID", "Nmae", "HQ city", "Stages", "website", "Notes"]
        .map(String::from)
        .to_vec();
    let canonical: Vec<String> = FIRM_COLUMNS.map(String::from).to_vec();
    let mapping = guess_column_mapping(&headers, &canonical);
    for (i, h) in headers.iter().enumerate() {
        match mapping.get(&i) {
            Some(c) => println!("{h:10} -> {c}"),
            None => println!("{h:10} -> (unmatched)"),
        }
    }
}

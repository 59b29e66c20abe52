//! Run every reproduction table.

use quasi_einstein::reproduce::{run, Case};

fn main() {
    for case in [Case::NoBlowdownLength, Case::IntervalFormula, Case::BlowdownConsistency] {
        println!("{}", run(case));
    }
}

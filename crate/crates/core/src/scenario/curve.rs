//! Time curves and their CSV form (`t_2J,value,solver`).

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::csvfmt::num;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Oracle,
    Resolvent,
    ClosedForm,
}

impl Solver {
    pub fn as_str(self) -> &'static str {
        match self {
            Solver::Oracle => "oracle",
            Solver::Resolvent => "resolvent",
            Solver::ClosedForm => "closed_form",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Solver::Oracle),
            "resolvent" => Ok(Solver::Resolvent),
            "closed_form" => Ok(Solver::ClosedForm),
            other => Err(Error::Parse(format!("unknown solver {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub solver: Solver,
    /// Units of `1/(2J)`.
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl Curve {
    pub fn new(solver: Solver, times: Vec<f64>, values: Vec<f64>) -> Self {
        Self { solver, times, values }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t_2J,value,solver")?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(w, "{},{},{}", num(*t), num(*v), self.solver)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

#[derive(Debug, Deserialize)]
struct Row {
    #[serde(rename = "t_2J")]
    t: f64,
    value: f64,
    solver: String,
}

/// Parses a curve CSV. All rows must name the same solver, times must be
/// finite and strictly increasing, values finite.
pub fn parse_curve_csv<R: Read>(reader: R) -> Result<Curve> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    for want in ["t_2J", "value", "solver"] {
        if !headers.iter().any(|h| h == want) {
            return Err(Error::Parse(format!("missing column {want:?}")));
        }
    }
    let mut solver = None;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, row) in rdr.deserialize::<Row>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        let s: Solver = row.solver.parse().map_err(|e: Error| Error::Parse(format!("line {line}: {e}")))?;
        if *solver.get_or_insert(s) != s {
            return Err(Error::Parse(format!("line {line}: mixed solvers in one curve")));
        }
        if !row.t.is_finite() || !row.value.is_finite() {
            return Err(Error::Parse(format!("line {line}: non-finite number")));
        }
        if times.last().is_some_and(|&prev| row.t <= prev) {
            return Err(Error::Parse(format!("line {line}: times must increase strictly")));
        }
        times.push(row.t);
        values.push(row.value);
    }
    let solver = solver.ok_or_else(|| Error::Parse("curve has no rows".into()))?;
    Ok(Curve { solver, times, values })
}

pub fn parse_curve_str(s: &str) -> Result<Curve> {
    parse_curve_csv(s.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn write_then_parse() {
        let c = Curve::new(Solver::Resolvent, vec![0.0, 0.1, 0.2], vec![1.0, 0.99, 1.0 / 3.0]);
        let s = c.to_csv_string();
        assert!(s.starts_with("t_2J,value,solver\n0.0000000000000000e0,1.0000000000000000e0,resolvent\n"));
        assert_eq!(parse_curve_str(&s).unwrap(), c);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "",
            "t_2J,value\n0,1\n",
            "t_2J,value,solver\n",
            "t_2J,value,solver\n0,1,magic\n",
            "t_2J,value,solver\n0,1,oracle\n0,1,oracle\n",
            "t_2J,value,solver\n0,1,oracle\n1,1,resolvent\n",
            "t_2J,value,solver\n0,NaN,oracle\n",
            "t_2J,value,solver\n0,x,oracle\n",
        ] {
            assert_eq!(parse_curve_str(bad).unwrap_err().kind(), "parse", "{bad:?}");
        }
    }

    proptest! {
        #[test]
        fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
            let _ = parse_curve_csv(bytes.as_slice());
        }
    }
}

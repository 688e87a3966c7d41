//! CSV rows `arg1,...,argN,alpha,beta,gamma,delta` to ground facts.

use anyhow::{bail, Context, Result};
use pddb_core::lang::{Constant, GroundAtom, PRule};
use pddb_core::parser::parse_query;
use pddb_core::{ConfidenceLevel, Mode};

/// Checks that `pred` is a bare predicate name.
pub fn check_predicate(pred: &str) -> Result<()> {
    match parse_query(pred) {
        Ok(a) if a.arity() == 0 && &*a.pred == pred => Ok(()),
        _ => bail!("`{pred}` is not a valid predicate name"),
    }
}

/// Parses CSV text into one fact per row, in row order. Confidences are
/// validated and reduced. Errors name the 1-based row.
pub fn facts_from_csv(text: &str, pred: &str, disj: Mode) -> Result<Vec<PRule>> {
    check_predicate(pred)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'%'))
        .from_reader(text.as_bytes());
    let mut arity = None;
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.with_context(|| format!("row {row}: unreadable CSV"))?;
        let fields: Vec<&str> = record.iter().collect();
        if fields.len() < 4 {
            bail!("row {row}: expected arguments followed by four probabilities, found {} fields", fields.len());
        }
        let n = fields.len() - 4;
        match arity {
            None => arity = Some(n),
            Some(a) if a != n => bail!("row {row}: {n} arguments, but earlier rows have {a}"),
            _ => {}
        }
        let mut p = [0.0; 4];
        for (k, cell) in fields[n..].iter().enumerate() {
            p[k] = cell
                .parse::<f64>()
                .with_context(|| format!("row {row}: `{cell}` is not a number"))?;
        }
        let conf = ConfidenceLevel::new(p[0], p[1], p[2], p[3])
            .and_then(|c| c.reduce())
            .with_context(|| format!("row {row}"))?;
        let args = fields[..n].iter().map(|s| Constant::from_text(s)).collect();
        out.push(PRule::fact(GroundAtom::new(pred, args), conf, disj));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pddb_core::parser::render_rule;

    fn one(row: &str) -> Result<String> {
        Ok(render_rule(&facts_from_csv(row, "e", Mode::PositiveCorrelation)?[0]))
    }

    #[test]
    fn rows_become_facts() {
        assert_eq!(one("1,2,1,1,0,0").unwrap(), "e(1,2) <[1,1],[0,0]>.");
        assert_eq!(one("3,2,0.9,0.9,0,0").unwrap(), "e(3,2) <[0.9,0.9],[0,0]>.");
        assert_eq!(one("a, Big c ,0.5,1,0.5,1").unwrap(), "e(a,'Big c') <[0.5,0.5],[0.5,0.5]>.");
    }

    #[test]
    fn bad_rows_are_named() {
        let e = facts_from_csv("1,2,1,1,0,0\n1,2,1.5,1,0,0\n", "e", Mode::PositiveCorrelation).unwrap_err();
        assert!(format!("{e:#}").starts_with("row 2"), "{e:#}");
        assert!(facts_from_csv("1,2,1,1,0,0\n1,1,1,0,0\n", "e", Mode::PositiveCorrelation).is_err());
        assert!(facts_from_csv("1,x,1,0\n", "e", Mode::PositiveCorrelation).is_err());
        assert!(facts_from_csv("1,0.8,0.5,0,0\n", "e", Mode::PositiveCorrelation).is_err());
        assert!(facts_from_csv("1,1,1,0,0\n", "E(", Mode::PositiveCorrelation).is_err());
    }
}

use std::io::{BufRead, Write};

use super::{Algo, SweepRecord};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "algo,walk_len,trial,seed,estimate,true_pi,rel_error,step_calls,probe_calls,footprint,elapsed_ms";

/// Header plus one row per record. Reals use 17 significant digits, which
/// round-trips every `f64`.
pub fn write_csv<W: Write>(records: &[SweepRecord], out: &mut W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{:.16e},{:.16e},{:.16e},{},{},{},{}",
            r.algo, r.walk_len, r.trial, r.seed, r.estimate, r.true_pi, r.rel_error, r.step_calls, r.probe_calls, r.footprint, r.elapsed_ms
        )?;
    }
    Ok(())
}

fn field<T: std::str::FromStr>(line: usize, name: &str, raw: Option<&str>) -> Result<T> {
    let raw = raw.ok_or_else(|| Error::Parse { line, msg: format!("missing `{name}`") })?;
    raw.parse().map_err(|_| Error::Parse { line, msg: format!("bad `{name}` value `{raw}`") })
}

pub fn parse_csv<R: BufRead>(input: R) -> Result<Vec<SweepRecord>> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim_end) != Some(CSV_HEADER) {
        return Err(Error::Parse { line: 1, msg: "missing or unexpected header".into() });
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let no = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let mut f = line.trim_end().split(',');
        let algo: Algo = f
            .next()
            .unwrap_or_default()
            .parse()
            .map_err(|_| Error::Parse { line: no, msg: "bad `algo`".into() })?;
        let rec = SweepRecord {
            algo,
            walk_len: field(no, "walk_len", f.next())?,
            trial: field(no, "trial", f.next())?,
            seed: field(no, "seed", f.next())?,
            estimate: field(no, "estimate", f.next())?,
            true_pi: field(no, "true_pi", f.next())?,
            rel_error: field(no, "rel_error", f.next())?,
            step_calls: field(no, "step_calls", f.next())?,
            probe_calls: field(no, "probe_calls", f.next())?,
            footprint: field(no, "footprint", f.next())?,
            elapsed_ms: field(no, "elapsed_ms", f.next())?,
        };
        if f.next().is_some() {
            return Err(Error::Parse { line: no, msg: "too many fields".into() });
        }
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(estimate: f64) -> SweepRecord {
        SweepRecord {
            algo: Algo::FullMassApprox,
            walk_len: 14,
            trial: 2,
            seed: u64::MAX,
            estimate,
            true_pi: 4e-4,
            rel_error: (estimate - 4e-4f64).abs() / 4e-4,
            step_calls: 123,
            probe_calls: 45,
            footprint: 67,
            elapsed_ms: 0,
        }
    }

    #[test]
    fn one_record_two_lines() {
        let mut buf = Vec::new();
        write_csv(&[sample(0.1)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("full_mass_approx,14,2,18446744073709551615,1.0000000000000001e-1,"));
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_csv("nope\n".as_bytes()).is_err());
        let bad = format!("{CSV_HEADER}\nmass_approx,1,2\n");
        assert!(matches!(parse_csv(bad.as_bytes()), Err(Error::Parse { line: 2, .. })));
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(est in proptest::num::f64::POSITIVE | proptest::num::f64::ZERO, calls in 0u64..u64::MAX / 2) {
            let mut r = sample(est);
            r.step_calls = calls;
            let mut buf = Vec::new();
            write_csv(std::slice::from_ref(&r), &mut buf).unwrap();
            let back = parse_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back.len(), 1);
            prop_assert_eq!(back[0].estimate.to_bits(), r.estimate.to_bits());
            prop_assert_eq!(back[0].rel_error.to_bits(), r.rel_error.to_bits());
            prop_assert_eq!(&back[0], &r);
        }
    }
}

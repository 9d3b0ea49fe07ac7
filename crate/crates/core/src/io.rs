//! CSV and JSON file formats.
//!
//! | artifact              | CSV header                                                   |
//! |-----------------------|--------------------------------------------------------------|
//! | orbit                 | `n,re,im` (n starts at -1)                                   |
//! | representative points | `k,re,im`                                                    |
//! | Lyapunov trace        | `k,estimate`                                                 |
//! | sweep                 | `cell_re,cell_im,classification,period,lambda_max,agree_fraction` |
//!
//! CSV floats carry 17 significant digits. JSON complex values are `[re, im]`.

use crate::cycle::PointVerdict;
use crate::error::{Error, Result};
use crate::map::{MapParameters, Orbit, OrbitStatus};
use crate::parse::format_f64;
use crate::sweep::{CellRecord, SweepResult};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

pub const ORBIT_HEADER: [&str; 3] = ["n", "re", "im"];
pub const POINTS_HEADER: [&str; 3] = ["k", "re", "im"];
pub const TRACE_HEADER: [&str; 2] = ["k", "estimate"];
pub const SWEEP_HEADER: [&str; 6] = [
    "cell_re",
    "cell_im",
    "classification",
    "period",
    "lambda_max",
    "agree_fraction",
];

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(bad(format!("expected CSV header {:?}", expected.join(","))));
    }
    Ok(())
}

fn field(record: &csv::StringRecord, i: usize) -> Result<&str> {
    record.get(i).ok_or_else(|| bad(format!("missing column {i}")))
}

fn float(record: &csv::StringRecord, i: usize) -> Result<f64> {
    let text = field(record, i)?;
    let x: f64 = text.trim().parse().map_err(|_| bad(format!("bad number {text:?}")))?;
    if !x.is_finite() {
        return Err(bad(format!("non-finite number {text:?}")));
    }
    Ok(x)
}

fn indexed_points<R: Read>(reader: R, header: &[&str], first: i64) -> Result<Vec<Complex64>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    check_header(&mut rdr, header)?;
    let mut out = Vec::new();
    for (offset, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != 3 {
            return Err(bad("expected three columns"));
        }
        let index: i64 = field(&record, 0)?
            .trim()
            .parse()
            .map_err(|_| bad("bad index"))?;
        if index != first + offset as i64 {
            return Err(bad(format!("index {index} out of sequence")));
        }
        out.push(Complex64::new(float(&record, 1)?, float(&record, 2)?));
    }
    Ok(out)
}

fn write_indexed_points<W: Write>(points: &[Complex64], header: &[&str], first: i64, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header)?;
    for (k, z) in points.iter().enumerate() {
        wtr.write_record([
            (first + k as i64).to_string(),
            format_f64(z.re),
            format_f64(z.im),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_orbit_csv<W: Write>(orbit: &Orbit, w: W) -> Result<()> {
    write_indexed_points(&orbit.points, &ORBIT_HEADER, -1, w)
}

/// Reads orbit points back; row `n` must be consecutive from -1.
pub fn read_orbit_csv<R: Read>(r: R) -> Result<Vec<Complex64>> {
    indexed_points(r, &ORBIT_HEADER, -1)
}

pub fn write_points_csv<W: Write>(points: &[Complex64], w: W) -> Result<()> {
    write_indexed_points(points, &POINTS_HEADER, 0, w)
}

pub fn read_points_csv<R: Read>(r: R) -> Result<Vec<Complex64>> {
    indexed_points(r, &POINTS_HEADER, 0)
}

pub fn write_trace_csv<W: Write>(estimates: &[f64], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(TRACE_HEADER)?;
    for (k, x) in estimates.iter().enumerate() {
        wtr.write_record([k.to_string(), format_f64(*x)])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_trace_csv<R: Read>(r: R) -> Result<Vec<f64>> {
    let mut rdr = csv::Reader::from_reader(r);
    check_header(&mut rdr, &TRACE_HEADER)?;
    let mut out = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        if field(&record, 0)?.trim().parse::<usize>().ok() != Some(k) {
            return Err(bad("trace index out of sequence"));
        }
        out.push(float(&record, 1)?);
    }
    Ok(out)
}

/// JSON document for an orbit export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitDocument {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub status: OrbitStatus,
    pub points: Vec<Complex64>,
}

impl OrbitDocument {
    pub fn new(params: &MapParameters, orbit: &Orbit) -> Self {
        Self {
            alpha: params.alpha,
            beta: params.beta,
            status: orbit.status,
            points: orbit.points.clone(),
        }
    }

    pub fn params(&self) -> MapParameters {
        MapParameters::new(self.alpha, self.beta)
    }

    pub fn orbit(&self) -> Orbit {
        Orbit {
            points: self.points.clone(),
            status: self.status,
        }
    }
}

pub fn write_orbit_json<W: Write>(params: &MapParameters, orbit: &Orbit, w: W) -> Result<()> {
    serde_json::to_writer(w, &OrbitDocument::new(params, orbit))?;
    Ok(())
}

/// Parses an orbit JSON document, rejecting non-finite values.
pub fn read_orbit_json<R: Read>(r: R) -> Result<OrbitDocument> {
    let doc: OrbitDocument = serde_json::from_reader(r)?;
    let finite = doc.alpha.is_finite() && doc.beta.is_finite() && doc.points.iter().all(|z| z.is_finite());
    if !finite {
        return Err(bad("orbit document contains non-finite values"));
    }
    Ok(doc)
}

pub fn write_sweep_csv<W: Write>(result: &SweepResult, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(SWEEP_HEADER)?;
    for r in &result.records {
        wtr.write_record([
            format_f64(r.cell_re),
            format_f64(r.cell_im),
            r.classification.label().to_string(),
            r.classification.period().map(|p| p.to_string()).unwrap_or_default(),
            r.lambda_max.map(format_f64).unwrap_or_default(),
            format_f64(r.agree_fraction),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: Read>(r: R) -> Result<SweepResult> {
    let mut rdr = csv::Reader::from_reader(r);
    check_header(&mut rdr, &SWEEP_HEADER)?;
    let mut records = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() != SWEEP_HEADER.len() {
            return Err(bad("expected six columns"));
        }
        let period = match field(&record, 3)?.trim() {
            "" => None,
            p => Some(p.parse::<usize>().map_err(|_| bad("bad period"))?),
        };
        let classification = PointVerdict::from_parts(field(&record, 2)?.trim(), period)
            .ok_or_else(|| bad("unknown classification/period combination"))?;
        let lambda_max = match field(&record, 4)?.trim() {
            "" => None,
            _ => Some(float(&record, 4)?),
        };
        records.push(CellRecord {
            cell_re: float(&record, 0)?,
            cell_im: float(&record, 1)?,
            classification,
            lambda_max,
            agree_fraction: float(&record, 5)?,
        });
    }
    Ok(SweepResult { records })
}

/// Pretty JSON with a trailing newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(value: &T, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{generate_orbit, OrbitSpec};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_orbit() -> (MapParameters, Orbit) {
        let p = MapParameters::new(c(0.0, 1.0), c(2.0, 3.0));
        let o = generate_orbit(&p, &OrbitSpec::new(c(0.3, 0.1), c(-0.2, 0.25), 25)).unwrap();
        (p, o)
    }

    #[test]
    fn orbit_csv_layout() {
        let (_, o) = sample_orbit();
        let mut buf = Vec::new();
        write_orbit_csv(&o, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("n,re,im"));
        assert_eq!(
            lines.next(),
            Some("-1,2.9999999999999999e-1,1.0000000000000001e-1")
        );
        assert!(lines.next().unwrap().starts_with("0,"));
        assert_eq!(read_orbit_csv(text.as_bytes()).unwrap(), o.points);
    }

    #[test]
    fn orbit_json_layout() {
        let (p, o) = sample_orbit();
        let mut buf = Vec::new();
        write_orbit_json(&p, &o, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["alpha"], serde_json::json!([0.0, 1.0]));
        assert_eq!(v["beta"], serde_json::json!([2.0, 3.0]));
        assert_eq!(v["status"], "Completed");
        assert_eq!(v["points"].as_array().unwrap().len(), 27);
        let doc = read_orbit_json(buf.as_slice()).unwrap();
        assert_eq!(doc.orbit(), o);
        assert_eq!(doc.params(), p);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(read_orbit_csv("n,re\n-1,0\n".as_bytes()).is_err());
        assert!(read_orbit_csv("n,re,im\n0,0,0\n".as_bytes()).is_err());
        assert!(read_orbit_csv("n,re,im\n-1,0,NaN\n".as_bytes()).is_err());
        assert!(read_orbit_csv("n,re,im\n-1,0\n".as_bytes()).is_err());
        assert!(read_orbit_json(r#"{"alpha":[0,1],"beta":[1,0],"status":"Done","points":[]}"#.as_bytes()).is_err());
        assert!(read_orbit_json(r#"{"alpha":[0,1],"beta":[1,0],"status":"Completed","points":[],"x":1}"#.as_bytes()).is_err());
        assert!(read_sweep_csv("cell_re,cell_im,classification,period,lambda_max,agree_fraction\n0,0,Periodic,,,1\n".as_bytes()).is_err());
        assert!(read_sweep_csv("cell_re,cell_im,classification,period,lambda_max,agree_fraction\n0,0,Chaotic,3,,1\n".as_bytes()).is_err());
    }

    #[test]
    fn sweep_csv_layout() {
        let result = SweepResult {
            records: vec![
                CellRecord {
                    cell_re: 0.5,
                    cell_im: -0.25,
                    classification: PointVerdict::Periodic(55),
                    lambda_max: None,
                    agree_fraction: 1.0,
                },
                CellRecord {
                    cell_re: 8.0,
                    cell_im: 43.0,
                    classification: PointVerdict::Chaotic,
                    lambda_max: Some(0.0027),
                    agree_fraction: 0.9,
                },
            ],
        };
        let mut buf = Vec::new();
        write_sweep_csv(&result, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("cell_re,cell_im,classification,period,lambda_max,agree_fraction\n"));
        assert!(text.contains(",Periodic,55,,"));
        assert_eq!(read_sweep_csv(text.as_bytes()).unwrap(), result);
    }

    #[test]
    fn trace_round_trip() {
        let trace = vec![0.1, -0.25, 1.0 / 3.0];
        let mut buf = Vec::new();
        write_trace_csv(&trace, &mut buf).unwrap();
        assert!(buf.starts_with(b"k,estimate\n0,"));
        assert_eq!(read_trace_csv(buf.as_slice()).unwrap(), trace);
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e3f64..1e3, proptest::num::f64::NORMAL, Just(0.0), Just(-0.0)]
    }

    proptest! {
        #[test]
        fn csv_points_round_trip(pts in proptest::collection::vec((finite(), finite()), 0..40)) {
            let points: Vec<Complex64> = pts.into_iter().map(|(a, b)| c(a, b)).collect();
            let mut buf = Vec::new();
            write_points_csv(&points, &mut buf).unwrap();
            let back = read_points_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back.len(), points.len());
            for (a, b) in back.iter().zip(&points) {
                prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
                prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }

        #[test]
        fn orbit_json_round_trips(pts in proptest::collection::vec((finite(), finite()), 0..40), step in 1usize..1000) {
            let orbit = Orbit {
                points: pts.into_iter().map(|(a, b)| c(a, b)).collect(),
                status: OrbitStatus::OverflowAtStep(step),
            };
            let p = MapParameters::new(c(1.5, -2.0), c(0.25, 1e-300));
            let mut buf = Vec::new();
            write_orbit_json(&p, &orbit, &mut buf).unwrap();
            let doc = read_orbit_json(buf.as_slice()).unwrap();
            prop_assert_eq!(doc.orbit(), orbit);
            prop_assert_eq!(doc.params(), p);
        }
    }
}

//! Line-oriented text format for network parameters.
//!
//! ```text
//! FSOMLP 1
//! <dims separated by spaces>
//! <one line per weight row, then one bias line, for every layer>
//! ```
//!
//! Values are written with 17 significant digits, which round-trips every
//! finite `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use super::mlp::Mlp;
use crate::harness::io::write_atomic;
use crate::{Error, Result};

pub const FORMAT_TAG: &str = "FSOMLP";
const FORMAT_VERSION: &str = "1";

fn push_values(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{v:.16e}").expect("writing to a String cannot fail");
    }
    out.push('\n');
}

pub fn write_params(net: &Mlp) -> String {
    let mut out = format!("{FORMAT_TAG} {FORMAT_VERSION}\n");
    let dims: Vec<String> = net.dims().iter().map(ToString::to_string).collect();
    out.push_str(&dims.join(" "));
    out.push('\n');
    for (l, (w, b)) in net.weights().iter().zip(net.biases()).enumerate() {
        let n_in = net.dims()[l];
        for row in w.chunks(n_in) {
            push_values(&mut out, row);
        }
        push_values(&mut out, b);
    }
    out
}

pub fn read_params(text: &str) -> Result<Mlp> {
    let eof_line = text.lines().count() + 1;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let malformed = |line: usize, msg: &str| Error::MalformedFile {
        line,
        msg: msg.to_string(),
    };

    let (_, header) = lines.next().ok_or_else(|| malformed(1, "empty file"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(FORMAT_TAG) {
        return Err(malformed(1, "missing FSOMLP tag"));
    }
    let version = parts
        .next()
        .ok_or_else(|| malformed(1, "missing version"))?;
    if version != FORMAT_VERSION || parts.next().is_some() {
        return Err(Error::Version(
            header.trim_start_matches(FORMAT_TAG).trim().to_string(),
        ));
    }

    let (_, dims_line) = lines
        .next()
        .ok_or_else(|| malformed(2, "missing layer dims"))?;
    let dims = dims_line
        .split_whitespace()
        .map(str::parse::<usize>)
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| malformed(2, &format!("bad layer dim: {e}")))?;
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Shape(format!("invalid layer dims {dims:?}")));
    }

    let mut read_row = |expected: usize, what: &str| -> Result<Vec<f64>> {
        let (n, line) = lines
            .next()
            .ok_or_else(|| malformed(eof_line, &format!("file truncated before {what}")))?;
        let values = line
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| malformed(n, &format!("bad number: {e}")))?;
        if values.len() != expected {
            return Err(Error::Shape(format!(
                "line {n}: {what} has {} values, expected {expected}",
                values.len()
            )));
        }
        Ok(values)
    };

    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for (l, w) in dims.windows(2).enumerate() {
        let (n_in, n_out) = (w[0], w[1]);
        let mut mat = Vec::with_capacity(n_in * n_out);
        for _ in 0..n_out {
            mat.extend(read_row(n_in, &format!("layer {l} weight row"))?);
        }
        weights.push(mat);
        biases.push(read_row(n_out, &format!("layer {l} bias"))?);
    }
    if let Some((n, line)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(malformed(
            n,
            &format!("unexpected trailing content `{line}`"),
        ));
    }
    Mlp::from_parts(dims, weights, biases)
}

pub fn save_params(net: &Mlp, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), write_params(net).as_bytes())
}

pub fn load_params(path: impl AsRef<Path>) -> Result<Mlp> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_params(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Streams;

    fn sample_net() -> Mlp {
        let mut rng = Streams::new(9).rng(&[0]);
        let mut net = Mlp::new_he(&[2, 5, 3, 4], &mut rng).unwrap();
        // make biases non-trivial too
        for (i, p) in net.params_mut().enumerate() {
            *p += (i as f64 * 0.37).sin() * 1e-3;
        }
        net
    }

    #[test]
    fn round_trip_is_bitwise_exact() {
        let net = sample_net();
        let back = read_params(&write_params(&net)).unwrap();
        assert_eq!(net, back);
        for (a, b) in net.params().zip(back.params()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rx.fsomlp");
        let net = sample_net();
        save_params(&net, &path).unwrap();
        assert_eq!(load_params(&path).unwrap(), net);
        assert!(matches!(
            load_params(dir.path().join("missing")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn header_and_layout() {
        let text = write_params(&sample_net());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "FSOMLP 1");
        assert_eq!(lines[1], "2 5 3 4");
        // 5 + 1 + 3 + 1 + 4 + 1 rows of parameters
        assert_eq!(lines.len(), 2 + 15);
    }

    #[test]
    fn distinct_errors() {
        let text = write_params(&sample_net());
        let truncated: String = text.lines().take(6).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            read_params(&truncated),
            Err(Error::MalformedFile { .. })
        ));
        assert!(matches!(read_params(""), Err(Error::MalformedFile { .. })));
        let wrong_version = text.replacen("FSOMLP 1", "FSOMLP 2", 1);
        assert!(matches!(read_params(&wrong_version), Err(Error::Version(v)) if v == "2"));
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[2].push_str(" 0.5");
        assert!(matches!(
            read_params(&lines.join("\n")),
            Err(Error::Shape(_))
        ));
        let garbage = text.replacen("2 5 3 4", "2 x 3 4", 1);
        assert!(matches!(
            read_params(&garbage),
            Err(Error::MalformedFile { line: 2, .. })
        ));
    }
}

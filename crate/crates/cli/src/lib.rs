//! Text formats and report rendering for the `rankmetric` command line.
//!
//! Matrix block:
//!
//! ```text
//! q rows cols
//! e11 e12 ...
//! ...
//! ```
//!
//! Entries are field elements in their integer encoding. A homomorphism file
//! is `HOM m n` followed by the images of the two generators; an embedding
//! file is `DELTA m n mult` followed by its conjugator. Readers reject
//! anything after the last expected block.

use std::fmt::Write as _;
use std::str::FromStr;

use rankmetric_core::embeddings::{DeltaEmbedding, Homomorphism};
use rankmetric_core::{format_rational, Field, Matrix, Rational};

/// Default cap on ambient dimensions, overridable through `RANKMETRIC_MAX_DIM`.
pub const DEFAULT_MAX_DIM: usize = 256;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] rankmetric_core::Error),
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Format { .. } => "FormatError",
            CliError::Usage(_) => "UsageError",
            CliError::Io(_) => "IoError",
            CliError::Core(e) => e.name(),
        }
    }

    /// 3 for instances that are valid but beyond capacity or repair, 2 for
    /// everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_capacity() => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn format_err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Format { line, msg: msg.into() }
}

/// Exact rational in strict `num/den` syntax.
pub fn parse_rational(s: &str) -> CliResult<Rational> {
    let bad = || CliError::Usage(format!("expected a rational num/den, got {s:?}"));
    let (num, den) = s.split_once('/').ok_or_else(bad)?;
    let num = i64::from_str(num.trim()).map_err(|_| bad())?;
    let den = i64::from_str(den.trim()).map_err(|_| bad())?;
    if den <= 0 {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

pub fn render_rational(r: &Rational) -> String {
    format_rational(r)
}

/// `RANKMETRIC_MAX_DIM`, or the default when unset.
pub fn max_dim_from_env() -> CliResult<usize> {
    match std::env::var("RANKMETRIC_MAX_DIM") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| CliError::Usage(format!("RANKMETRIC_MAX_DIM must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_MAX_DIM),
    }
}

pub fn check_dim(n: usize, max_dim: usize) -> CliResult<()> {
    if n > max_dim {
        return Err(rankmetric_core::Error::TooLarge("ambient dimension exceeds RANKMETRIC_MAX_DIM").into());
    }
    Ok(())
}

/// Line cursor over a text input that tracks line numbers for errors.
pub struct Reader<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(text: &'a str) -> Reader<'a> {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .collect();
        Reader { lines, pos: 0 }
    }

    fn next_line(&mut self, what: &str) -> CliResult<(usize, &'a str)> {
        let line = self
            .lines
            .get(self.pos)
            .copied()
            .ok_or_else(|| format_err(self.lines.len() + 1, format!("unexpected end of input, expected {what}")))?;
        self.pos += 1;
        Ok(line)
    }

    fn numbers(line: usize, text: &str, count: usize) -> CliResult<Vec<u64>> {
        let parsed: Vec<u64> = text
            .split_whitespace()
            .map(|t| t.parse::<u64>().map_err(|_| format_err(line, format!("not a non-negative integer: {t:?}"))))
            .collect::<CliResult<_>>()?;
        if parsed.len() != count {
            return Err(format_err(line, format!("expected {count} integers, found {}", parsed.len())));
        }
        Ok(parsed)
    }

    /// One matrix block.
    pub fn matrix(&mut self) -> CliResult<Matrix> {
        let (line, header) = self.next_line("a matrix header `q rows cols`")?;
        let h = Self::numbers(line, header, 3)?;
        let field = Field::builtin(h[0]).map_err(|e| format_err(line, format!("field order {}: {e}", h[0])))?;
        let (rows, cols) = (h[1] as usize, h[2] as usize);
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (line, text) = self.next_line("a matrix row")?;
            for v in Self::numbers(line, text, cols)? {
                if v >= h[0] {
                    return Err(format_err(line, format!("entry {v} is not below q = {}", h[0])));
                }
                data.push(v as u32);
            }
        }
        Ok(Matrix::from_vec(&field, rows, cols, data)?)
    }

    /// A `HOM m n` header and its two image blocks.
    pub fn homomorphism(&mut self) -> CliResult<Homomorphism> {
        let (line, header) = self.next_line("a `HOM m n` header")?;
        let rest = header
            .strip_prefix("HOM")
            .ok_or_else(|| format_err(line, "expected `HOM m n`"))?;
        let h = Self::numbers(line, rest, 2)?;
        let (m, n) = (h[0] as usize, h[1] as usize);
        let a = self.matrix()?;
        let b = self.matrix()?;
        for img in [&a, &b] {
            if img.rows() != n || img.cols() != n {
                return Err(format_err(line, format!("images must be {n}x{n}")));
            }
        }
        Ok(Homomorphism::new(m, a, b)?)
    }

    /// A `DELTA m n mult` header and its conjugator block.
    pub fn delta_embedding(&mut self) -> CliResult<DeltaEmbedding> {
        let (line, header) = self.next_line("a `DELTA m n mult` header")?;
        let rest = header
            .strip_prefix("DELTA")
            .ok_or_else(|| format_err(line, "expected `DELTA m n mult`"))?;
        let h = Self::numbers(line, rest, 3)?;
        let (m, n, mult) = (h[0] as usize, h[1] as usize, h[2] as usize);
        let conj = self.matrix()?;
        if conj.rows() != n || conj.cols() != n {
            return Err(format_err(line, format!("conjugator must be {n}x{n}")));
        }
        Ok(DeltaEmbedding::new(m, mult, conj)?)
    }

    /// Fails on any non-empty line left over.
    pub fn finish(self) -> CliResult<()> {
        match self.lines[self.pos..].iter().find(|(_, l)| !l.is_empty()) {
            Some((line, _)) => Err(format_err(*line, "trailing content after the last block")),
            None => Ok(()),
        }
    }
}

pub fn read_matrix(text: &str) -> CliResult<Matrix> {
    let mut r = Reader::new(text);
    let m = r.matrix()?;
    r.finish()?;
    Ok(m)
}

/// Two consecutive matrix blocks, e.g. a generator pair.
pub fn read_pair(text: &str) -> CliResult<(Matrix, Matrix)> {
    let mut r = Reader::new(text);
    let x = r.matrix()?;
    let y = r.matrix()?;
    r.finish()?;
    Ok((x, y))
}

pub fn read_homomorphism(text: &str) -> CliResult<Homomorphism> {
    let mut r = Reader::new(text);
    let h = r.homomorphism()?;
    r.finish()?;
    Ok(h)
}

pub fn read_delta_embedding(text: &str) -> CliResult<DeltaEmbedding> {
    let mut r = Reader::new(text);
    let d = r.delta_embedding()?;
    r.finish()?;
    Ok(d)
}

pub fn write_matrix(x: &Matrix) -> String {
    let mut out = format!("{} {} {}\n", x.field().order(), x.rows(), x.cols());
    for r in 0..x.rows() {
        let row: Vec<String> = x.row(r).iter().map(u32::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_homomorphism(h: &Homomorphism) -> String {
    let (a, b) = h.images();
    let mut out = format!("HOM {} {}\n", h.source_dim(), h.target_dim());
    out.push_str(&write_matrix(a));
    out.push_str(&write_matrix(b));
    out
}

pub fn write_delta_embedding(d: &DeltaEmbedding) -> String {
    let mut out = format!("DELTA {} {} {}\n", d.source_dim(), d.target_dim(), d.multiplicity());
    out.push_str(&write_matrix(d.conjugator()));
    out
}

/// `p k c0 ... ck`, the modulus listed from the constant term up.
pub fn write_field_line(f: &Field) -> String {
    format!("{f}\n")
}

pub fn parse_field_line(text: &str) -> CliResult<Field> {
    let mut r = Reader::new(text);
    let (line, t) = r.next_line("a field line `p k c0 ... ck`")?;
    let nums: Vec<u64> = t
        .split_whitespace()
        .map(|v| v.parse::<u64>().map_err(|_| format_err(line, format!("not an integer: {v:?}"))))
        .collect::<CliResult<_>>()?;
    if nums.len() < 3 {
        return Err(format_err(line, "expected `p k c0 ... ck`"));
    }
    let (p, k) = (nums[0], nums[1] as usize);
    if nums.len() != k + 3 {
        return Err(format_err(line, format!("a degree-{k} modulus has {} coefficients", k + 1)));
    }
    let modulus: Vec<u32> = nums[2..].iter().map(|&c| c as u32).collect();
    r.finish()?;
    Ok(Field::new(p, k, Some(&modulus))?)
}

/// `key value` lines in insertion order.
#[derive(Default)]
pub struct Report {
    text: String,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn line(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Report {
        let _ = writeln!(self.text, "{key} {value}");
        self
    }

    pub fn raw(&mut self, text: &str) -> &mut Report {
        self.text.push_str(text);
        if !text.is_empty() && !text.ends_with('\n') {
            self.text.push('\n');
        }
        self
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rankmetric_core::matrix::kassabov_generators;

    #[test]
    fn matrix_round_trip_over_extension_field() {
        let f = Field::builtin(4).unwrap();
        let x = Matrix::from_rows(&f, &[vec![0, 1, 2], vec![3, 0, 1]]).unwrap();
        let text = write_matrix(&x);
        assert_eq!(text, "4 2 3\n0 1 2\n3 0 1\n");
        assert_eq!(read_matrix(&text).unwrap(), x);
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        let err = read_matrix("2 1 1\n1\n0\n").unwrap_err();
        assert!(matches!(err, CliError::Format { line: 3, .. }));
        assert!(read_matrix("2 1 1\n1\n\n").is_ok());
    }

    #[test]
    fn malformed_blocks() {
        assert!(read_matrix("2 2 2\n0 1\n1\n").is_err());
        assert!(read_matrix("2 1 2\n0 2\n").is_err());
        assert!(read_matrix("6 1 1\n0\n").is_err());
        assert!(read_matrix("2 1 1\n-1\n").is_err());
        assert!(read_matrix("").is_err());
    }

    #[test]
    fn homomorphism_and_embedding_round_trip() {
        let f = Field::builtin(3).unwrap();
        let h = Homomorphism::iota(&f, 6, 2).unwrap();
        let text = write_homomorphism(&h);
        assert!(text.starts_with("HOM 2 6\n3 6 6\n"));
        assert_eq!(read_homomorphism(&text).unwrap(), h);

        let d = DeltaEmbedding::standard(&f, 2, 5, 2).unwrap();
        let text = write_delta_embedding(&d);
        assert!(text.starts_with("DELTA 2 5 2\n"));
        let back = read_delta_embedding(&text).unwrap();
        assert_eq!(back.conjugator(), d.conjugator());
        assert_eq!(back.multiplicity(), 2);
    }

    #[test]
    fn hom_header_must_match_images() {
        let f = Field::builtin(2).unwrap();
        let (a, b) = kassabov_generators(2, &f);
        let text = format!("HOM 2 3\n{}{}", write_matrix(&a), write_matrix(&b));
        assert!(read_homomorphism(&text).is_err());
    }

    #[test]
    fn field_line_round_trip() {
        let f = Field::builtin(8).unwrap();
        let line = write_field_line(&f);
        assert_eq!(parse_field_line(&line).unwrap(), f);
        assert!(parse_field_line("2 2 1 1 1 9").is_err());
        assert_eq!(parse_field_line("2 2 0 0 1").unwrap_err().name(), "ReducibleModulus");
    }

    #[test]
    fn rationals_are_strict() {
        assert_eq!(parse_rational("2/4").unwrap(), Rational::new(1, 2));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
    }
}

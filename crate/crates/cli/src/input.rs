//! Readers for the four input formats. Windows and Unix line endings are
//! both accepted; blank lines are skipped.

use std::path::Path;
use std::str::FromStr;

use discrete_fdr::testgen::{fisher_supports, hg2011_to_tables, poisson_supports};
use discrete_fdr::{Alternative, ContingencyTable, PValueSupport, PoissonTestSpec, Problem};

use crate::args::{Format, InputArgs};
use crate::error::{CliError, CliResult};

/// A parsed problem plus the raw bytes of every file read, for hashing.
pub struct Loaded {
    pub problem: Problem,
    pub files: Vec<Vec<u8>>,
}

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

/// Data rows as `(line number, fields)`, with an optional header removed.
struct Rows {
    rows: Vec<(u64, Vec<String>)>,
}

fn parse_rows(
    path: &Path,
    bytes: &[u8],
    header: &[&str],
    header_required: bool,
) -> CliResult<Rows> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::input(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let fields: Vec<String> = record.iter().map(str::to_owned).collect();
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push((line, fields));
    }
    let expected: Vec<String> = header.iter().map(|h| h.to_ascii_lowercase()).collect();
    match rows.first() {
        Some((_, first))
            if first
                .iter()
                .map(|f| f.to_ascii_lowercase())
                .eq(expected.iter().cloned()) =>
        {
            rows.remove(0);
        }
        Some((line, _)) if header_required => {
            return Err(CliError::input(
                path,
                *line,
                format!("expected header '{}'", header.join(",")),
            ));
        }
        _ => {}
    }
    if rows.is_empty() {
        return Err(CliError::input_file(path, "no data rows"));
    }
    for (line, fields) in &rows {
        if fields.len() != header.len() {
            return Err(CliError::input(
                path,
                *line,
                format!("expected {} columns, found {}", header.len(), fields.len()),
            ));
        }
    }
    Ok(Rows { rows })
}

fn field<T: FromStr>(path: &Path, line: u64, value: &str, what: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| CliError::input(path, line, format!("invalid {what} '{value}'")))
}

pub fn read_tables(path: &Path, bytes: &[u8]) -> CliResult<Vec<ContingencyTable>> {
    let rows = parse_rows(path, bytes, &["X1", "Y1", "X2", "Y2"], false)?;
    rows.rows
        .iter()
        .map(|(line, f)| {
            let c = |i: usize| field::<u64>(path, *line, &f[i], "count");
            Ok(ContingencyTable::new(c(0)?, c(1)?, c(2)?, c(3)?))
        })
        .collect()
}

pub fn read_hg2011(path: &Path, bytes: &[u8]) -> CliResult<Vec<(u64, u64)>> {
    let header = ["drug_id", "amnesia_count", "other_adverse_count"];
    let rows = parse_rows(path, bytes, &header, true)?;
    rows.rows
        .iter()
        .map(|(line, f)| {
            Ok((
                field(path, *line, &f[1], "count")?,
                field(path, *line, &f[2], "count")?,
            ))
        })
        .collect()
}

pub fn read_poisson(path: &Path, bytes: &[u8]) -> CliResult<Vec<PoissonTestSpec>> {
    let rows = parse_rows(path, bytes, &["count", "lambda0"], false)?;
    rows.rows
        .iter()
        .map(|(line, f)| {
            let n = field(path, *line, &f[0], "count")?;
            let lambda: f64 = field(path, *line, &f[1], "rate")?;
            PoissonTestSpec::new(n, lambda).map_err(|e| CliError::input(path, *line, e.to_string()))
        })
        .collect()
}

pub fn read_pvalues(path: &Path, bytes: &[u8]) -> CliResult<Vec<f64>> {
    let rows = parse_rows(path, bytes, &["p"], false)?;
    rows.rows
        .iter()
        .map(|(line, f)| {
            let p: f64 = field(path, *line, &f[0], "p-value")?;
            if (0.0..=1.0).contains(&p) {
                Ok(p)
            } else {
                Err(CliError::input(
                    path,
                    *line,
                    format!("p-value {p} outside [0, 1]"),
                ))
            }
        })
        .collect()
}

/// One support per non-blank line, atoms separated by whitespace.
pub fn read_supports(path: &Path, bytes: &[u8]) -> CliResult<Vec<PValueSupport<f64>>> {
    let text = std::str::from_utf8(bytes).map_err(|_| CliError::input_file(path, "not UTF-8"))?;
    let mut supports = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let atoms = line
            .split_whitespace()
            .map(|a| field::<f64>(path, line_no, a, "atom"))
            .collect::<CliResult<Vec<f64>>>()?;
        let support =
            PValueSupport::new(atoms).map_err(|e| CliError::input(path, line_no, e.to_string()))?;
        supports.push(support);
    }
    if supports.is_empty() {
        return Err(CliError::input_file(path, "no supports"));
    }
    Ok(supports)
}

/// Reads the input files and builds the problem. `alpha` sets the
/// truncation of Poisson supports.
pub fn load(args: &InputArgs, alpha: f64) -> CliResult<Loaded> {
    args.check()?;
    let bytes = read_bytes(&args.input)?;
    let path = args.input.as_path();
    let fisher = |tables: &[ContingencyTable], alt: Alternative| {
        let (raw, supports) = fisher_supports(tables, alt);
        Problem::new(raw, supports).map_err(|e| CliError::input_file(path, e.to_string()))
    };
    let mut files = vec![bytes.clone()];
    let problem = match args.format {
        Format::Tables => {
            let tables = read_tables(path, &bytes)?;
            fisher(&tables, args.alternative()?.expect("Fisher format"))?
        }
        Format::Hg2011 => {
            let counts = read_hg2011(path, &bytes)?;
            let tables =
                hg2011_to_tables(&counts).map_err(|e| CliError::input_file(path, e.to_string()))?;
            fisher(&tables, args.alternative()?.expect("Fisher format"))?
        }
        Format::Poisson => {
            let specs = read_poisson(path, &bytes)?;
            let (raw, supports, _) = poisson_supports(&specs, alpha);
            Problem::new(raw, supports).map_err(|e| CliError::input_file(path, e.to_string()))?
        }
        Format::Pvalues => {
            let raw = read_pvalues(path, &bytes)?;
            let support_path = args.supports.as_deref().expect("checked");
            let support_bytes = read_bytes(support_path)?;
            let supports = read_supports(support_path, &support_bytes)?;
            if supports.len() != raw.len() {
                return Err(CliError::input_file(
                    support_path,
                    format!("{} supports for {} p-values", supports.len(), raw.len()),
                ));
            }
            files.push(support_bytes);
            Problem::new(raw, supports).map_err(|e| CliError::input_file(path, e.to_string()))?
        }
    };
    Ok(Loaded { problem, files })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("in.csv")
    }

    #[test]
    fn tables_with_and_without_header() {
        let a = read_tables(p(), b"X1,Y1,X2,Y2\n4,144,0,132\n2,146,0,132\n").unwrap();
        let b = read_tables(p(), b"4,144,0,132\r\n2,146,0,132\r\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0], ContingencyTable::new(4, 144, 0, 132));
    }

    #[test]
    fn errors_name_the_line() {
        let err = read_tables(p(), b"X1,Y1,X2,Y2\n4,144,0,132\n2,x,0,132\n").unwrap_err();
        assert_eq!(err.to_string(), "in.csv:3: invalid count 'x'");
        let err = read_tables(p(), b"4,144,0\n").unwrap_err();
        assert_eq!(err.to_string(), "in.csv:1: expected 4 columns, found 3");
        assert_eq!(err.exit_code(), 2);
        assert_eq!(read_tables(p(), b"").unwrap_err().exit_code(), 2);
        assert_eq!(
            read_tables(p(), b"X1,Y1,X2,Y2\n").unwrap_err().exit_code(),
            2
        );
    }

    #[test]
    fn hg2011_requires_header() {
        let ok = read_hg2011(
            p(),
            b"drug_id,amnesia_count,other_adverse_count\nA,2,8\nB,1,9\n",
        )
        .unwrap();
        assert_eq!(ok, vec![(2, 8), (1, 9)]);
        let err = read_hg2011(p(), b"A,2,8\nB,1,9\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn supports_file() {
        let s = read_supports(Path::new("s.txt"), b"0.5 1\r\n\n0.2 0.7 1.0\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].atoms(), &[0.2, 0.7, 1.0]);
        let err = read_supports(Path::new("s.txt"), b"0.5 1\n0.5 2\n").unwrap_err();
        assert!(err.to_string().starts_with("s.txt:2:"));
    }
}

//! Molecular integrals over spatial orbitals and FCIDUMP ingestion.
//!
//! File indices are 1-based; everything in memory is 0-based. Spin orbitals
//! use a block layout: `[0, n)` are alpha over spatial orbitals `0..n`, and
//! `[n, 2n)` are beta.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CqeError, Result};

/// Core energy, one-electron integrals `h_pq` and two-electron integrals
/// `(pq|rs)` in chemists' notation, all with the real-orbital permutational
/// symmetries expanded.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularIntegrals {
    n_spatial: usize,
    n_electrons: usize,
    ms2: i64,
    core_energy: f64,
    h: Vec<f64>,
    v: Vec<f64>,
    orbital_symmetry: Vec<u32>,
}

impl MolecularIntegrals {
    /// Builds from dense arrays. `h` is `n*n` row-major; `v` is `n^4` with
    /// index `((p*n + q)*n + r)*n + s`. Symmetry is not enforced here.
    pub fn from_dense(
        n_spatial: usize,
        n_electrons: usize,
        ms2: i64,
        core_energy: f64,
        h: Vec<f64>,
        v: Vec<f64>,
    ) -> Self {
        assert!(n_spatial >= 1, "at least one spatial orbital is required");
        assert!(n_electrons <= 2 * n_spatial, "too many electrons for the orbital space");
        assert_eq!(h.len(), n_spatial * n_spatial, "one-electron array has the wrong length");
        assert_eq!(v.len(), n_spatial.pow(4), "two-electron array has the wrong length");
        Self { n_spatial, n_electrons, ms2, core_energy, h, v, orbital_symmetry: vec![1; n_spatial] }
    }

    /// Attaches point-group irrep labels (FCIDUMP `ORBSYM` numbering).
    pub fn with_orbital_symmetry(mut self, labels: Vec<u32>) -> Self {
        assert_eq!(labels.len(), self.n_spatial, "one irrep label per orbital");
        self.orbital_symmetry = labels;
        self
    }

    /// Irrep label per spatial orbital; all 1 when the source had none.
    pub fn orbital_symmetry(&self) -> &[u32] {
        &self.orbital_symmetry
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    /// The `MS2` value reported in the file header. Informational only.
    pub fn ms2(&self) -> i64 {
        self.ms2
    }

    pub fn core_energy(&self) -> f64 {
        self.core_energy
    }

    #[inline]
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h[p * self.n_spatial + q]
    }

    /// `(pq|rs)` in chemists' notation.
    #[inline]
    pub fn v(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_spatial;
        self.v[((p * n + q) * n + r) * n + s]
    }

    /// One-electron integral between spin orbitals; zero across spins.
    pub fn spin_orbital_h(&self, p: usize, q: usize) -> f64 {
        let n = self.n_spatial;
        assert!(p < 2 * n && q < 2 * n, "spin-orbital index out of range");
        if p / n != q / n {
            return 0.0;
        }
        self.h(p % n, q % n)
    }

    /// Physicists' `<pq|rs>` over spin orbitals.
    #[inline]
    pub fn spin_orbital_coulomb(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_spatial;
        if p / n != r / n || q / n != s / n {
            return 0.0;
        }
        self.v(p % n, r % n, q % n, s % n)
    }

    /// Antisymmetrized `<pq||rs> = <pq|rs> - <pq|sr>`.
    #[inline]
    pub fn antisymmetrized(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.spin_orbital_coulomb(p, q, r, s) - self.spin_orbital_coulomb(p, q, s, r)
    }

    pub fn from_fcidump_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| CqeError::Io {
            path: path.display().to_string(),
            source,
        })?;
        parse_fcidump(&text)
    }

    /// Serializes back to FCIDUMP text, one line per symmetry-unique nonzero
    /// integral. Values are written in shortest round-trip form.
    pub fn to_fcidump(&self) -> String {
        let n = self.n_spatial;
        let mut out = String::new();
        let orbsym = self.orbital_symmetry.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        let _ = writeln!(
            out,
            "&FCI NORB={},NELEC={},MS2={},\n  ORBSYM={},\n  ISYM=1,\n&END",
            n, self.n_electrons, self.ms2, orbsym
        );
        for i in 0..n {
            for j in 0..=i {
                for k in 0..n {
                    for l in 0..=k {
                        if i * (i + 1) / 2 + j < k * (k + 1) / 2 + l {
                            continue;
                        }
                        let value = self.v(i, j, k, l);
                        if value != 0.0 {
                            let _ = writeln!(out, "{:e} {} {} {} {}", value, i + 1, j + 1, k + 1, l + 1);
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..=i {
                let value = self.h(i, j);
                if value != 0.0 {
                    let _ = writeln!(out, "{:e} {} {} 0 0", value, i + 1, j + 1);
                }
            }
        }
        let _ = writeln!(out, "{:e} 0 0 0 0", self.core_energy);
        out
    }
}

/// The eight index tuples related to `(pq|rs)` by real-orbital symmetry.
pub(crate) fn symmetry_partners(p: usize, q: usize, r: usize, s: usize) -> [(usize, usize, usize, usize); 8] {
    [
        (p, q, r, s),
        (q, p, r, s),
        (p, q, s, r),
        (q, p, s, r),
        (r, s, p, q),
        (s, r, p, q),
        (r, s, q, p),
        (s, r, q, p),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EntryKey {
    Core,
    One(usize, usize),
    Two(usize, usize, usize, usize),
}

struct Header {
    norb: usize,
    nelec: usize,
    ms2: i64,
    orbsym: Option<Vec<u32>>,
}

fn header_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    let upper = text.to_ascii_uppercase();
    let bytes = upper.as_bytes();
    let mut search = 0;
    while let Some(found) = upper[search..].find(key) {
        let start = search + found;
        let end = start + key.len();
        search = end;
        let preceded_ok = start == 0 || !bytes[start - 1].is_ascii_alphanumeric();
        let rest = upper[end..].trim_start();
        if preceded_ok && rest.starts_with('=') {
            let offset = text.len() - rest.len() + 1;
            return Some(text[offset..].trim_start());
        }
    }
    None
}

fn parse_header(text: &str, line: usize) -> Result<Header> {
    let integer = |key: &str, required: bool| -> Result<Option<i64>> {
        let Some(raw) = header_value(text, key) else {
            if required {
                return Err(CqeError::Parse { line, message: format!("header is missing {key}") });
            }
            return Ok(None);
        };
        let digits: String = raw
            .chars()
            .take_while(|c| c.is_ascii_digit() || *c == '-' || *c == '+')
            .collect();
        digits.parse::<i64>().map(Some).map_err(|_| CqeError::Parse {
            line,
            message: format!("cannot read integer value for {key}"),
        })
    };
    let norb = integer("NORB", true)?.unwrap_or_default();
    let nelec = integer("NELEC", true)?.unwrap_or_default();
    let ms2 = integer("MS2", false)?.unwrap_or(0);
    if !(1..=32).contains(&norb) {
        return Err(CqeError::Parse { line, message: format!("NORB={norb} outside the supported range 1..=32") });
    }
    if nelec < 0 || nelec > 2 * norb {
        return Err(CqeError::Parse { line, message: format!("NELEC={nelec} incompatible with NORB={norb}") });
    }
    let orbsym = match header_value(text, "ORBSYM") {
        None => None,
        Some(raw) => {
            let mut labels = Vec::new();
            for field in raw.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()) {
                match field.parse::<u32>() {
                    Ok(label) if labels.len() < norb as usize => labels.push(label),
                    _ => break,
                }
            }
            if labels.len() != norb as usize {
                return Err(CqeError::Parse {
                    line,
                    message: format!("ORBSYM lists {} labels for NORB={norb}", labels.len()),
                });
            }
            Some(labels)
        }
    };
    Ok(Header { norb: norb as usize, nelec: nelec as usize, ms2, orbsym })
}

/// Parses Molpro-style FCIDUMP text.
///
/// The namelist header (`&FCI ... &END` or `/`) must define `NORB` and
/// `NELEC`; `ORBSYM` is kept as orbital labels, `ISYM` and other keys are
/// ignored. Each body line is
/// `value i j k l`: all-zero indices carry the core energy, `k = l = 0`
/// carries `h_ij`, and four nonzero indices carry `(ij|kl)`. Lines of the
/// form `e i 0 0 0` (orbital energies) are skipped.
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let lines: Vec<&str> = text.lines().collect();
    let mut header_text = String::new();
    let mut body_start = None;
    for (idx, raw) in lines.iter().enumerate() {
        let trimmed = raw.trim();
        let upper = trimmed.to_ascii_uppercase();
        if idx == 0 && !upper.starts_with("&FCI") && !upper.starts_with("$FCI") {
            return Err(CqeError::Parse { line: 1, message: "expected &FCI namelist header".into() });
        }
        let ends = upper == "/" || upper.ends_with("&END") || upper.ends_with("$END") || upper.ends_with('/');
        header_text.push_str(trimmed);
        header_text.push(' ');
        if ends {
            body_start = Some(idx + 1);
            break;
        }
    }
    let Some(body_start) = body_start else {
        return Err(CqeError::Parse { line: lines.len().max(1), message: "unterminated namelist header".into() });
    };
    let header = parse_header(&header_text, body_start)?;
    let n = header.norb;

    let mut entries: HashMap<EntryKey, (f64, usize)> = HashMap::new();
    for (offset, raw) in lines[body_start..].iter().enumerate() {
        let line = body_start + offset + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(CqeError::Parse { line, message: format!("expected 5 fields, found {}", fields.len()) });
        }
        let value: f64 = fields[0]
            .replace(['D', 'd'], "e")
            .parse()
            .map_err(|_| CqeError::Parse { line, message: format!("invalid number '{}'", fields[0]) })?;
        if !value.is_finite() {
            return Err(CqeError::Parse { line, message: "non-finite integral value".into() });
        }
        let mut idx = [0usize; 4];
        for (slot, field) in idx.iter_mut().zip(&fields[1..]) {
            let parsed: i64 = field
                .parse()
                .map_err(|_| CqeError::Parse { line, message: format!("invalid index '{field}'") })?;
            if parsed < 0 || parsed as usize > n {
                return Err(CqeError::Parse {
                    line,
                    message: format!("index {parsed} outside [0, {n}]"),
                });
            }
            *slot = parsed as usize;
        }
        let [i, j, k, l] = idx;
        let key = match (i, j, k, l) {
            (0, 0, 0, 0) => EntryKey::Core,
            (i, 0, 0, 0) if i > 0 => continue,
            (i, j, 0, 0) if i > 0 && j > 0 => EntryKey::One(i.max(j) - 1, i.min(j) - 1),
            (i, j, k, l) if i > 0 && j > 0 && k > 0 && l > 0 => {
                let canonical = symmetry_partners(i - 1, j - 1, k - 1, l - 1).into_iter().min().unwrap();
                EntryKey::Two(canonical.0, canonical.1, canonical.2, canonical.3)
            }
            _ => {
                return Err(CqeError::Parse {
                    line,
                    message: format!("unrecognized index pattern {i} {j} {k} {l}"),
                })
            }
        };
        if let Some((previous, first_line)) = entries.get(&key) {
            if (previous - value).abs() > 1e-12 {
                return Err(CqeError::Parse {
                    line,
                    message: format!("conflicting duplicate of the entry on line {first_line} ({previous} vs {value})"),
                });
            }
            continue;
        }
        entries.insert(key, (value, line));
    }

    let mut core_energy = 0.0;
    let mut h = vec![0.0; n * n];
    let mut v = vec![0.0; n.pow(4)];
    for (key, (value, _)) in entries {
        match key {
            EntryKey::Core => core_energy = value,
            EntryKey::One(p, q) => {
                h[p * n + q] = value;
                h[q * n + p] = value;
            }
            EntryKey::Two(p, q, r, s) => {
                for (a, b, c, d) in symmetry_partners(p, q, r, s) {
                    v[((a * n + b) * n + c) * n + d] = value;
                }
            }
        }
    }
    let ints = MolecularIntegrals::from_dense(n, header.nelec, header.ms2, core_energy, h, v);
    Ok(match header.orbsym {
        Some(labels) => ints.with_orbital_symmetry(labels),
        None => ints,
    })
}

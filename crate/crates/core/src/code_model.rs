//! Generator matrix plus a two-file partition of the information symbols.
//!
//! File F1 always occupies the leading `s1` coordinates and F2 the trailing
//! `s2`. Callers wanting another split permute rows first.

use std::fmt::Write as _;
use std::ops::Range;

use serde::Serialize;

use crate::constructions::Family;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::{unit_vector, Matrix, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FileId {
    F1,
    F2,
}

impl FileId {
    pub const BOTH: [FileId; 2] = [FileId::F1, FileId::F2];

    pub fn other(self) -> FileId {
        match self {
            FileId::F1 => FileId::F2,
            FileId::F2 => FileId::F1,
        }
    }

    /// 1 or 2.
    pub fn number(self) -> usize {
        match self {
            FileId::F1 => 1,
            FileId::F2 => 2,
        }
    }

    pub fn from_number(i: usize) -> Result<FileId> {
        match i {
            1 => Ok(FileId::F1),
            2 => Ok(FileId::F2),
            _ => Err(Error::InvalidArgument(format!(
                "file index {i} not in {{1, 2}}"
            ))),
        }
    }
}

/// Split of `k = s1 + s2` information symbols into two files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FilePartition {
    pub s1: usize,
    pub s2: usize,
}

impl FilePartition {
    pub fn new(k: usize, s1: usize) -> Result<Self> {
        if s1 == 0 || s1 >= k {
            return Err(Error::BadPartition { s1, k });
        }
        Ok(Self { s1, s2: k - s1 })
    }

    pub fn k(&self) -> usize {
        self.s1 + self.s2
    }

    pub fn dim(&self, file: FileId) -> usize {
        match file {
            FileId::F1 => self.s1,
            FileId::F2 => self.s2,
        }
    }

    /// Coordinates spanned by the file's standard basis vectors.
    pub fn coords(&self, file: FileId) -> Range<usize> {
        match file {
            FileId::F1 => 0..self.s1,
            FileId::F2 => self.s1..self.k(),
        }
    }

    pub fn s_max(&self) -> usize {
        self.s1.max(self.s2)
    }

    pub fn s_min(&self) -> usize {
        self.s1.min(self.s2)
    }
}

/// A validated rank-`k` generator matrix with its file partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    matrix: Matrix,
    partition: FilePartition,
}

impl CodeSpec {
    pub fn new(matrix: Matrix, s1: usize) -> Result<Self> {
        let k = matrix.rows();
        let partition = FilePartition::new(k, s1)?;
        let rank = matrix.rank();
        if rank < k {
            return Err(Error::RankDeficient { rank, k });
        }
        Ok(Self { matrix, partition })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn partition(&self) -> FilePartition {
        self.partition
    }

    pub fn field(&self) -> PrimeField {
        self.matrix.field()
    }

    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    /// Same matrix under a different partition.
    pub fn with_s1(&self, s1: usize) -> Result<CodeSpec> {
        Ok(Self {
            matrix: self.matrix.clone(),
            partition: FilePartition::new(self.k(), s1)?,
        })
    }

    /// Standard basis vectors spanning the file subspace.
    pub fn file_basis(&self, file: FileId) -> Vec<Vector> {
        self.partition
            .coords(file)
            .map(|i| unit_vector(self.k(), i))
            .collect()
    }

    pub fn classify_columns(&self) -> ColumnClassification {
        let mut c = ColumnClassification::default();
        let r1 = self.partition.coords(FileId::F1);
        let r2 = self.partition.coords(FileId::F2);
        for j in 0..self.n() {
            let nz1 = r1.clone().any(|i| self.matrix.get(i, j) != 0);
            let nz2 = r2.clone().any(|i| self.matrix.get(i, j) != 0);
            match (nz1, nz2) {
                (true, false) => c.pure1.push(j),
                (false, true) => c.pure2.push(j),
                (true, true) => c.mixed.push(j),
                (false, false) => c.zero.push(j),
            }
        }
        c.n_f1 = c.pure1.len();
        c.n_f2 = c.pure2.len();
        c.m_mix = c.mixed.len();
        c
    }

    /// The `s_i x n` matrix of coordinates belonging to `file`.
    pub fn project_columns(&self, file: FileId) -> Matrix {
        self.matrix.select_rows(self.partition.coords(file))
    }
}

/// Column indices (0-based) by which file subspace they lie in.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ColumnClassification {
    pub pure1: Vec<usize>,
    pub pure2: Vec<usize>,
    pub mixed: Vec<usize>,
    /// All-zero columns; never useful, excluded from both pure sets.
    pub zero: Vec<usize>,
    pub n_f1: usize,
    pub n_f2: usize,
    pub m_mix: usize,
}

impl ColumnClassification {
    pub fn n_pure(&self, file: FileId) -> usize {
        match file {
            FileId::F1 => self.n_f1,
            FileId::F2 => self.n_f2,
        }
    }
}

/// A matrix read from the text format, with its optional construction tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeFile {
    pub matrix: Matrix,
    pub family: Option<Family>,
}

const FAMILY_PREFIX: &str = "family:";

/// Parses the matrix text format:
///
/// ```text
/// # optional comments, e.g. "# family: hybrid k=4"
/// q k n
/// <k lines of n integers in [0, q)>
/// ```
pub fn parse_matrix(text: &str) -> Result<CodeFile> {
    let mut family = None;
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(tag) = comment.trim().strip_prefix(FAMILY_PREFIX) {
                family = Some(tag.trim().parse::<Family>().map_err(|e| Error::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        lines.push((lineno, line));
    }

    let mut it = lines.into_iter();
    let (hl, header) = it.next().ok_or(Error::Parse {
        line: 0,
        msg: "missing header line `q k n`".into(),
    })?;
    let head = parse_ints(hl, header)?;
    let [q, k, n] = head[..] else {
        return Err(Error::Parse {
            line: hl,
            msg: format!("header needs 3 integers, found {}", head.len()),
        });
    };
    let field = PrimeField::new(q).map_err(|e| Error::Parse {
        line: hl,
        msg: e.to_string(),
    })?;
    let (k, n) = (k as usize, n as usize);

    let mut data = Vec::with_capacity(k * n);
    for r in 0..k {
        let (ln, line) = it.next().ok_or(Error::Parse {
            line: hl,
            msg: format!("expected {k} matrix rows, found {r}"),
        })?;
        let row = parse_ints(ln, line)?;
        if row.len() != n {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected {n} entries, found {}", row.len()),
            });
        }
        if let Some(bad) = row.iter().find(|&&x| x >= q) {
            return Err(Error::Parse {
                line: ln,
                msg: format!("entry {bad} not in [0, {q})"),
            });
        }
        data.extend(row);
    }
    if let Some((ln, _)) = it.next() {
        return Err(Error::Parse {
            line: ln,
            msg: "trailing content after matrix".into(),
        });
    }
    let matrix = Matrix::new(field, k, n, data).map_err(|e| Error::Parse {
        line: hl,
        msg: e.to_string(),
    })?;
    Ok(CodeFile { matrix, family })
}

fn parse_ints(line: usize, s: &str) -> Result<Vec<u64>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<u64>().map_err(|_| Error::Parse {
                line,
                msg: format!("not a non-negative integer: {t:?}"),
            })
        })
        .collect()
}

/// Writes the matrix text format (ASCII, LF line endings).
pub fn write_matrix(matrix: &Matrix, family: Option<&Family>) -> String {
    let mut out = String::new();
    if let Some(f) = family {
        let _ = writeln!(out, "# {FAMILY_PREFIX} {f}");
    }
    let _ = writeln!(
        out,
        "{} {} {}",
        matrix.field().modulus(),
        matrix.rows(),
        matrix.cols()
    );
    for r in 0..matrix.rows() {
        let row: Vec<String> = matrix.row(r).iter().map(u64::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

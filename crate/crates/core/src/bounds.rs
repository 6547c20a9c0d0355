//! Lower and upper bounds on achievable `(E1, E2)` pairs, point checks and
//! plotting tables.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::code_model::{CodeSpec, FileId, FilePartition};
use crate::error::{Error, Result};
use crate::expectation::{
    beta_floor, closed_dedicated_E, closed_global_mds_E, harmonic, harmonic_diff, RetrievalPair,
};
use crate::scalar::{f64_to_decimal, rational_from_usize, serde_rational, Scalar};
use crate::Rational;

/// Significant digits of decimal columns in region tables.
pub const REGION_DIGITS: usize = 12;

/// One cut of the polytope family, indexed by `s*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutParams<T = Rational> {
    pub s_star: usize,
    pub a1: T,
    pub a2: T,
    pub b: T,
}

impl<T: Scalar> CutParams<T> {
    /// `B/A1 + B/A2 - 1`.
    pub fn rhs(&self) -> T {
        self.b.clone() / self.a1.clone() + self.b.clone() / self.a2.clone() - T::one()
    }

    /// `E1/A1 + E2/A2`.
    pub fn lhs(&self, e1: &T, e2: &T) -> T {
        e1.clone() / self.a1.clone() + e2.clone() / self.a2.clone()
    }

    /// `E2` on the cut line at the given `E1`.
    pub fn boundary_e2(&self, e1: &T) -> T {
        self.a2.clone() * (self.rhs() - e1.clone() / self.a1.clone())
    }
}

/// Valid cut indices `max(s1, s2) ..= k - 1`.
pub fn cut_range(part: FilePartition) -> std::ops::RangeInclusive<usize> {
    part.s_max()..=part.k() - 1
}

/// `A_i = sum_{s=s_i}^{s*} n/(n-s)` and `B = n H_n - sum_{s=s*+1}^{n-1} n/(n-s)`.
pub fn cut_params<T: Scalar>(n: usize, part: FilePartition, s_star: usize) -> Result<CutParams<T>> {
    let k = part.k();
    if !cut_range(part).contains(&s_star) || k > n {
        return Err(Error::InvalidArgument(format!(
            "cut index s* = {s_star} outside {}..={} (n = {n}, k = {k})",
            part.s_max(),
            k - 1
        )));
    }
    let nn = T::from_usize_exact(n);
    // sum_{s=a}^{b} n/(n-s) = n (H_{n-a} - H_{n-b-1})
    let a = |s_i: usize| nn.clone() * harmonic_diff::<T>(n - s_i, n - s_star - 1);
    Ok(CutParams {
        s_star,
        a1: a(part.s1),
        a2: a(part.s2),
        b: nn.clone() * harmonic_diff::<T>(n, n - s_star - 1),
    })
}

pub fn all_cuts<T: Scalar>(n: usize, part: FilePartition) -> Result<Vec<CutParams<T>>> {
    cut_range(part).map(|s| cut_params(n, part, s)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutCheck<T = Rational> {
    pub satisfied: bool,
    /// `LHS - RHS`; non-negative iff satisfied.
    pub slack: T,
}

pub fn check_cut<T: Scalar>(point: &RetrievalPair<T>, cut: &CutParams<T>) -> CutCheck<T> {
    let slack = cut.lhs(&point.e1, &point.e2) - cut.rhs();
    CutCheck {
        satisfied: !slack.is_negative(),
        slack,
    }
}

/// A lower bound that is linear in `(E1, E2)`.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearBound {
    /// `E_i >= rhs`.
    Floor {
        name: String,
        file: FileId,
        rhs: Rational,
    },
    /// `E1 + E2 >= rhs`.
    Sum { name: String, rhs: Rational },
    /// `E1/A1 + E2/A2 >= B/A1 + B/A2 - 1`.
    Cut(CutParams),
}

impl LinearBound {
    pub fn name(&self) -> String {
        match self {
            LinearBound::Floor { name, .. } | LinearBound::Sum { name, .. } => name.clone(),
            LinearBound::Cut(c) => format!("cut_s{}", c.s_star),
        }
    }

    pub fn evaluate(&self, point: &RetrievalPair<Rational>) -> BoundEntry {
        let (relation, value, rhs) = match self {
            LinearBound::Floor { file, rhs, .. } => (
                format!("E{} >= rhs", file.number()),
                point.get(*file).clone(),
                rhs.clone(),
            ),
            LinearBound::Sum { rhs, .. } => (
                "E1 + E2 >= rhs".to_string(),
                &point.e1 + &point.e2,
                rhs.clone(),
            ),
            LinearBound::Cut(c) => (
                "E1/A1 + E2/A2 >= B/A1 + B/A2 - 1".to_string(),
                c.lhs(&point.e1, &point.e2),
                c.rhs(),
            ),
        };
        BoundEntry::lower(self.name(), relation, value, rhs, false)
    }
}

/// Every linear lower bound at `(n, k, s1, s2)`: dimension floors, the joint
/// bound, the MDS rank-sum bound, the β floors and all cuts.
pub fn linear_bounds(n: usize, part: FilePartition) -> Result<Vec<LinearBound>> {
    let k = part.k();
    let nn = rational_from_usize(n);
    let mut out = Vec::new();
    for f in FileId::BOTH {
        out.push(LinearBound::Floor {
            name: format!("basic_e{}", f.number()),
            file: f,
            rhs: rational_from_usize(part.dim(f)),
        });
    }
    out.push(LinearBound::Sum {
        name: "joint".into(),
        rhs: rational_from_usize(k + part.s_min()),
    });
    let two_hn: Rational = harmonic::<Rational>(n) * rational_from_usize(2);
    out.push(LinearBound::Sum {
        name: "mds_rank_sum".into(),
        rhs: nn * (two_hn - harmonic::<Rational>(n - k) - harmonic::<Rational>(n - part.s_min())),
    });
    for f in FileId::BOTH {
        out.push(LinearBound::Floor {
            name: format!("beta_e{}", f.number()),
            file: f,
            rhs: beta_floor(n, part.dim(f)),
        });
    }
    for c in all_cuts(n, part)? {
        out.push(LinearBound::Cut(c));
    }
    Ok(out)
}

/// `N(F_i)` as used by the projection bounds: columns lying in `F_i`,
/// including all-zero columns.
pub fn subspace_counts(code: &CodeSpec) -> (usize, usize) {
    let c = code.classify_columns();
    (c.n_f1 + c.zero.len(), c.n_f2 + c.zero.len())
}

/// `2 - (N(F1) + N(F2)) / n`, an upper bound on `s1/E1 + s2/E2` for this
/// code.
pub fn nonlinear_rhs(code: &CodeSpec) -> Rational {
    let (n1, n2) = subspace_counts(code);
    rational_from_usize(2) - BigRational::new((n1 + n2).into(), code.n().into())
}

/// `E_i >= n s_i / (n - N(F_{3-i}))`.
pub fn projection_floor(code: &CodeSpec, file: FileId) -> Rational {
    let (n1, n2) = subspace_counts(code);
    let other = match file {
        FileId::F1 => n2,
        FileId::F2 => n1,
    };
    let n = code.n();
    BigRational::new((n * code.partition().dim(file)).into(), (n - other).into())
}

/// `s1/E1 + s2/E2`.
pub fn hyperbolic_sum<T: Scalar>(point: &RetrievalPair<T>, part: FilePartition) -> T {
    T::from_usize_exact(part.s1) / point.e1.clone()
        + T::from_usize_exact(part.s2) / point.e2.clone()
}

/// Upper bounds on `s1/E1 + s2/E2` valid for every code:
/// `(1 + s_max/k, k^2 / (2 s_min^2 + s_max^2))`.
pub fn closed_upper_bounds<T: Scalar>(part: FilePartition) -> (T, T) {
    let (k, lo, hi) = (part.k(), part.s_min(), part.s_max());
    let kk = T::from_usize_exact(k);
    let smax = T::one() + T::from_usize_exact(hi) / kk.clone();
    let cs = kk.clone() * kk / T::from_usize_exact(2 * lo * lo + hi * hi);
    (smax, cs)
}

/// One evaluated bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundEntry {
    pub name: String,
    pub relation: String,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
    pub satisfied: bool,
    /// Distance to the boundary, signed so that it is non-negative iff
    /// satisfied.
    #[serde(with = "serde_rational")]
    pub slack: Rational,
    /// True for the unproved hyperbolic bound.
    pub conjectured: bool,
}

impl BoundEntry {
    fn lower(name: String, relation: String, value: Rational, rhs: Rational, conj: bool) -> Self {
        let slack = value - &rhs;
        Self {
            name,
            relation,
            satisfied: !slack.is_negative(),
            rhs,
            slack,
            conjectured: conj,
        }
    }

    fn upper(name: String, relation: String, value: Rational, rhs: Rational, conj: bool) -> Self {
        let slack = &rhs - value;
        Self {
            name,
            relation,
            satisfied: !slack.is_negative(),
            rhs,
            slack,
            conjectured: conj,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    #[serde(serialize_with = "serialize_pair")]
    pub point: RetrievalPair<Rational>,
    #[serde(with = "serde_rational")]
    pub hyperbolic_sum: Rational,
    pub entries: Vec<BoundEntry>,
}

fn serialize_pair<S: serde::Serializer>(
    p: &RetrievalPair<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("RetrievalPair", 2)?;
    st.serialize_field("e1", &p.e1.to_string())?;
    st.serialize_field("e2", &p.e2.to_string())?;
    st.end()
}

impl BoundReport {
    /// Every proved bound is satisfied (conjectured entries ignored).
    pub fn all_proved_satisfied(&self) -> bool {
        self.entries.iter().all(|e| e.satisfied || e.conjectured)
    }

    pub fn entry(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn violations(&self) -> Vec<&BoundEntry> {
        self.entries.iter().filter(|e| !e.satisfied).collect()
    }
}

/// Checks a pair against the bounds that hold for any code with these
/// parameters: every linear bound and both closed upper bounds, plus the
/// conjectured hyperbola.
pub fn parameter_report(
    n: usize,
    part: FilePartition,
    point: &RetrievalPair<Rational>,
) -> Result<BoundReport> {
    let mut entries: Vec<BoundEntry> = linear_bounds(n, part)?
        .iter()
        .map(|b| b.evaluate(point))
        .collect();
    let h = hyperbolic_sum(point, part);
    let (smax, cs) = closed_upper_bounds::<Rational>(part);
    let rel = "s1/E1 + s2/E2 <= rhs";
    entries.push(BoundEntry::upper(
        "smax".into(),
        rel.into(),
        h.clone(),
        smax,
        false,
    ));
    entries.push(BoundEntry::upper(
        "cauchy_schwarz".into(),
        rel.into(),
        h.clone(),
        cs,
        false,
    ));
    let relation = if part.s_max() >= 2 {
        rel.to_string()
    } else {
        format!("{rel} (excluded regime: max(s1, s2) = 1)")
    };
    entries.push(BoundEntry::upper(
        "hyperbolic_conjectured".into(),
        relation,
        h.clone(),
        rational_from_usize(1),
        true,
    ));
    Ok(BoundReport {
        point: point.clone(),
        hyperbolic_sum: h,
        entries,
    })
}

/// [`parameter_report`] plus the code-specific projection bounds.
pub fn bound_report(code: &CodeSpec, point: &RetrievalPair<Rational>) -> Result<BoundReport> {
    let part = code.partition();
    let mut report = parameter_report(code.n(), part, point)?;
    let h = report.hyperbolic_sum.clone();
    let at = report.entries.len() - 1;
    report.entries.insert(
        at,
        BoundEntry::upper(
            "nonlinear".into(),
            "s1/E1 + s2/E2 <= 2 - (N(F1) + N(F2))/n".into(),
            h,
            nonlinear_rhs(code),
            false,
        ),
    );
    for f in FileId::BOTH {
        let i = f.number();
        let other = f.other().number();
        report.entries.insert(
            at,
            BoundEntry::lower(
                format!("proj_e{i}"),
                format!("E{i} >= n s{i} / (n - N(F{other}))"),
                point.get(f).clone(),
                projection_floor(code, f),
                false,
            ),
        );
    }
    Ok(report)
}

/// Counts grid points that satisfy the `s* = k-1` cut but violate a cut with
/// smaller `s*`. The grid spans `[s_i, n H_{s_i}]` in each coordinate and is
/// evaluated exactly.
pub fn cut_dominance_violations(n: usize, part: FilePartition, grid: usize) -> Result<usize> {
    if grid < 2 {
        return Err(Error::InvalidArgument(
            "grid needs at least 2 points".into(),
        ));
    }
    let cuts: Vec<CutParams> = all_cuts(n, part)?;
    let (tight, rest) = cuts.split_last().expect("cut range is never empty");
    let axis = |s_i: usize| -> Vec<Rational> {
        let lo = rational_from_usize(s_i);
        let hi = rational_from_usize(n) * harmonic::<Rational>(s_i);
        let step = (hi - &lo) / rational_from_usize(grid - 1);
        (0..grid)
            .map(|i| &lo + &step * rational_from_usize(i))
            .collect()
    };
    let (xs, ys) = (axis(part.s1), axis(part.s2));
    let count = xs
        .par_iter()
        .map(|x| {
            ys.iter()
                .filter(|y| {
                    let p = RetrievalPair::new((*x).clone(), (*y).clone());
                    check_cut(&p, tight).satisfied
                        && rest.iter().any(|c| !check_cut(&p, c).satisfied)
                })
                .count()
        })
        .sum();
    Ok(count)
}

/// Row kinds of a region table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Cut(usize),
    Smax,
    CauchySchwarz,
    HyperbolaConjectured,
    DedicatedPoint,
    GlobalMdsPoint,
}

impl RowKind {
    pub fn label(&self) -> String {
        match self {
            RowKind::Cut(s) => format!("cut_s{s}"),
            RowKind::Smax => "smax".into(),
            RowKind::CauchySchwarz => "cauchy_schwarz".into(),
            RowKind::HyperbolaConjectured => "hyperbola_conjectured".into(),
            RowKind::DedicatedPoint => "dedicated_point".into(),
            RowKind::GlobalMdsPoint => "global_mds_point".into(),
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(self, RowKind::DedicatedPoint | RowKind::GlobalMdsPoint)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionRow {
    pub kind: RowKind,
    pub e1: f64,
    pub e2: f64,
    /// Exact coordinates of discrete operating points.
    pub exact: Option<RetrievalPair<Rational>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionTable {
    pub n: usize,
    pub part: FilePartition,
    pub rows: Vec<RegionRow>,
}

type Curve = Box<dyn Fn(f64) -> f64 + Sync>;

/// Curves and discrete points of one region panel.
///
/// Curves are sampled at `grid` values of `E1` spread evenly over
/// `[s1, n H_{s1}]`, the span of the dedicated operating points; a curve
/// contributes a row only where its `E2` is finite and positive.
pub fn region_table(n: usize, part: FilePartition, grid: usize) -> Result<RegionTable> {
    if grid < 2 {
        return Err(Error::InvalidArgument(
            "grid needs at least 2 points".into(),
        ));
    }
    let k = part.k();
    if n < k {
        return Err(Error::InvalidArgument(format!(
            "need n >= k, got n = {n}, k = {k}"
        )));
    }
    let (s1, s2) = (part.s1 as f64, part.s2 as f64);
    let lo = s1;
    let hi = n as f64 * harmonic::<f64>(part.s1);
    let xs: Vec<f64> = (0..grid)
        .map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64)
        .collect();

    let mut curves: Vec<(RowKind, Curve)> = Vec::new();
    for c in all_cuts::<f64>(n, part)? {
        curves.push((RowKind::Cut(c.s_star), Box::new(move |x| c.boundary_e2(&x))));
    }
    let (smax, cs) = closed_upper_bounds::<f64>(part);
    let hyper = move |level: f64| move |x: f64| s2 / (level - s1 / x);
    curves.push((RowKind::Smax, Box::new(hyper(smax))));
    curves.push((RowKind::CauchySchwarz, Box::new(hyper(cs))));
    curves.push((RowKind::HyperbolaConjectured, Box::new(hyper(1.0))));

    let mut rows: Vec<RegionRow> = curves
        .par_iter()
        .flat_map_iter(|(kind, f)| {
            xs.iter().filter_map(move |&x| {
                let y = f(x);
                (y.is_finite() && y > 0.0).then_some(RegionRow {
                    kind: *kind,
                    e1: x,
                    e2: y,
                    exact: None,
                })
            })
        })
        .collect();

    for n1 in part.s1..=n - part.s2 {
        let pair = RetrievalPair::new(
            closed_dedicated_E::<Rational>(n, n1, part.s1),
            closed_dedicated_E::<Rational>(n, n - n1, part.s2),
        );
        rows.push(point_row(RowKind::DedicatedPoint, pair));
    }
    let global = RetrievalPair::new(
        closed_global_mds_E::<Rational>(n, k, part.s1),
        closed_global_mds_E::<Rational>(n, k, part.s2),
    );
    rows.push(point_row(RowKind::GlobalMdsPoint, global));
    Ok(RegionTable { n, part, rows })
}

fn point_row(kind: RowKind, pair: RetrievalPair<Rational>) -> RegionRow {
    RegionRow {
        kind,
        e1: pair.e1.to_f64(),
        e2: pair.e2.to_f64(),
        exact: Some(pair),
    }
}

impl RegionTable {
    pub fn points(&self, kind: RowKind) -> impl Iterator<Item = &RegionRow> {
        self.rows.iter().filter(move |r| r.kind == kind)
    }

    /// Kinds present, in order of first appearance.
    pub fn kinds(&self) -> Vec<RowKind> {
        let mut out: Vec<RowKind> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.kind) {
                out.push(r.kind);
            }
        }
        out
    }

    /// Exact check of every discrete point against every emitted line: all
    /// cuts, `smax`, `cauchy_schwarz` and the conjectured hyperbola.
    pub fn points_satisfy_lines(&self) -> Result<bool> {
        let cuts: Vec<CutParams> = all_cuts(self.n, self.part)?;
        let (smax, cs) = closed_upper_bounds::<Rational>(self.part);
        let one = rational_from_usize(1);
        Ok(self.rows.iter().filter_map(|r| r.exact.as_ref()).all(|p| {
            let h = hyperbolic_sum(p, self.part);
            cuts.iter().all(|c| check_cut(p, c).satisfied) && h <= smax && h <= cs && h <= one
        }))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let p = self.part;
        let _ = writeln!(
            out,
            "# region n={} k={} s1={} s2={}",
            self.n,
            p.k(),
            p.s1,
            p.s2
        );
        let _ = writeln!(
            out,
            "# hyperbola_conjectured rows follow s1/E1 + s2/E2 = 1, a conjectured boundary, not a proved bound"
        );
        let _ = writeln!(
            out,
            "# dedicated_point and global_mds_point rows append e1_exact,e2_exact"
        );
        let _ = writeln!(out, "# kind,e1,e2");
        for r in &self.rows {
            let _ = write!(
                out,
                "{},{},{}",
                r.kind.label(),
                f64_to_decimal(r.e1, REGION_DIGITS),
                f64_to_decimal(r.e2, REGION_DIGITS)
            );
            if let Some(x) = &r.exact {
                let _ = write!(out, ",{},{}", x.e1, x.e2);
            }
            out.push('\n');
        }
        out
    }
}

//! Sweep grids, flattened report rows, and their JSON and CSV encodings.
//!
//! Rows are sorted by `(p, family tag, parameters, seed)` after parallel
//! execution, so output bytes do not depend on scheduling.

use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analyze::{conjecture_report, AnalyzeError, PairReport};
use crate::families::{FamilyError, FamilySpec, ParamValue};
use crate::field::{is_prime, FieldCtx, FieldError};
use crate::morph::{default_budget, random_chain, KindWeights, MorphError, MorphismChain};
use crate::poly::MultiPoly;

/// Version of the JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 21] = [
    "p",
    "family",
    "chain",
    "params",
    "seed",
    "f1",
    "f2",
    "deg1",
    "deg2",
    "is_jacobian",
    "jacobian_value",
    "automorphic",
    "pts_inf_1",
    "pts_inf_2",
    "pts_inf_mod_p_1",
    "pts_inf_mod_p_2",
    "triangle_1",
    "triangle_2",
    "deg_divides",
    "low_degree_applicable",
    "extension_degree",
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no chain with a type (b) map found for p = {p}, seed = {seed}")]
    NoTypeB { p: u64, seed: u64 },
    #[error("chain length must be positive")]
    ZeroLength,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Morph(#[from] MorphError),
    #[error(transparent)]
    Analyze(#[from] AnalyzeError),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("unsupported report schema {0}")]
    Schema(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainKind {
    /// Types 1, 2, 2* and 3.
    PMorphism,
    /// As above plus type (b) maps; at least one type (b) map per chain.
    Mixed,
}

impl ChainKind {
    pub fn tag(self) -> &'static str {
        match self {
            ChainKind::PMorphism => "chain-pmorph",
            ChainKind::Mixed => "chain-mixed",
        }
    }
}

/// Seeded random chains run at every prime of the grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSet {
    pub kind: ChainKind,
    pub seeds: Vec<u64>,
    pub length: usize,
    /// Image degree cap; `None` means `3p^2`.
    pub budget: Option<u32>,
}

/// Parameter ranges for a generated family. A missing `a` range means
/// every `a` for which the family is defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyRange {
    Linear { a: Option<RangeInclusive<u32>>, m: Vec<u32>, alpha: Vec<u64> },
    Quadratic { a: Option<RangeInclusive<u32>>, s: Vec<u32>, alpha1: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SweepGrid {
    pub primes: Vec<u64>,
    pub families: Vec<FamilyRange>,
    pub chains: Vec<ChainSet>,
}

/// One unit of sweep work.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridPoint {
    Family(FamilySpec),
    Chain { p: u64, kind: ChainKind, seed: u64, length: usize, budget: u32 },
}

const MIXED_REDRAWS: usize = 1000;

type SortKey = (u64, String, Vec<ParamValue>, Option<u64>);

impl GridPoint {
    pub fn p(&self) -> u64 {
        match self {
            GridPoint::Family(f) => f.p(),
            GridPoint::Chain { p, .. } => *p,
        }
    }

    fn sort_key(&self) -> SortKey {
        match self {
            GridPoint::Family(f) => (f.p(), f.tag().to_string(), f.params().into_iter().map(|x| x.1).collect(), None),
            GridPoint::Chain { p, kind, seed, length, budget } => (
                *p,
                kind.tag().to_string(),
                vec![ParamValue::Int(*length as i64), ParamValue::Int(*budget as i64)],
                Some(*seed),
            ),
        }
    }

    /// The chain this point generates, if it is a chain point.
    pub fn chain(&self) -> Result<Option<MorphismChain>, ReportError> {
        let GridPoint::Chain { p, kind, seed, length, budget } = self else {
            return Ok(None);
        };
        let ctx = FieldCtx::new(*p)?;
        let weights = match kind {
            ChainKind::PMorphism => KindWeights::P_MORPHISM,
            ChainKind::Mixed => KindWeights::MIXED,
        };
        let chain = random_chain(ctx, *seed, *length, &weights, *budget)?;
        if *kind == ChainKind::PMorphism || chain.maps().iter().any(|m| m.is_type_b()) {
            return Ok(Some(chain));
        }
        // Force a type (b) member by drawing from the next seeds in a
        // fixed sequence.
        let mut s = *seed;
        for _ in 0..MIXED_REDRAWS {
            s = s.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let c = random_chain(ctx, s, *length, &weights, *budget)?;
            if c.maps().iter().any(|m| m.is_type_b()) {
                return Ok(Some(c));
            }
        }
        Err(ReportError::NoTypeB { p: *p, seed: *seed })
    }
}

fn range_or(r: &Option<RangeInclusive<u32>>, default: RangeInclusive<u32>) -> RangeInclusive<u32> {
    r.clone().unwrap_or(default)
}

/// Primes of the standard chain sweep.
pub const STANDARD_PRIMES: [u64; 4] = [2, 3, 5, 7];
/// Seeds per prime in the standard chain sweep.
pub const STANDARD_SEEDS: u64 = 200;
/// Maps per chain in the standard chain sweep.
pub const STANDARD_LENGTH: usize = 4;

impl SweepGrid {
    /// 200 seeded p-morphism chains at each of p = 2, 3, 5, 7 with the
    /// default degree cap.
    pub fn standard() -> Self {
        SweepGrid {
            primes: STANDARD_PRIMES.to_vec(),
            families: vec![],
            chains: vec![ChainSet {
                kind: ChainKind::PMorphism,
                seeds: (0..STANDARD_SEEDS).collect(),
                length: STANDARD_LENGTH,
                budget: None,
            }],
        }
    }

    /// All grid points, invalid family parameter combinations dropped, in
    /// canonical order.
    pub fn expand(&self) -> Result<Vec<GridPoint>, ReportError> {
        let mut out = Vec::new();
        for &p in &self.primes {
            if !is_prime(p) {
                return Err(ReportError::NotPrime(p));
            }
            let pp = p as u32;
            for fam in &self.families {
                match fam {
                    FamilyRange::Linear { a, m, alpha } => {
                        for &m in m {
                            for a in range_or(a, 2..=(m * pp).saturating_sub(1)) {
                                for &alpha in alpha {
                                    out.push(FamilySpec::Linear { p, a, m, alpha });
                                }
                            }
                        }
                    }
                    FamilyRange::Quadratic { a, s, alpha1 } => {
                        for &s in s {
                            for a in range_or(a, 1..=s * pp) {
                                for &alpha1 in alpha1 {
                                    out.push(FamilySpec::Quadratic { p, a, s, alpha1 });
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut points: Vec<GridPoint> =
            out.into_iter().filter(|f| f.type_b().is_ok()).map(GridPoint::Family).collect();
        for &p in &self.primes {
            for set in &self.chains {
                if set.length == 0 {
                    return Err(ReportError::ZeroLength);
                }
                let budget = set.budget.unwrap_or_else(|| default_budget(p));
                for &seed in &set.seeds {
                    points.push(GridPoint::Chain { p, kind: set.kind, seed, length: set.length, budget });
                }
            }
        }
        points.sort_by_cached_key(|g| g.sort_key());
        points.dedup();
        Ok(points)
    }
}

/// A [`PairReport`] flattened for output, plus where the pair came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub p: u64,
    pub family: Option<String>,
    pub chain: Option<String>,
    pub params: String,
    pub seed: Option<u64>,
    pub f1: String,
    pub f2: String,
    pub deg1: u32,
    pub deg2: u32,
    pub is_jacobian: bool,
    pub jacobian_value: String,
    pub automorphic: bool,
    pub pts_inf: [u32; 2],
    pub pts_inf_mod_p: [Option<u32>; 2],
    pub triangle: [bool; 2],
    pub deg_divides: bool,
    pub low_degree_applicable: bool,
    pub extension_degree: Option<u128>,
}

impl ReportRow {
    /// Row with empty provenance.
    pub fn from_report(r: &PairReport, f1: &MultiPoly, f2: &MultiPoly) -> Self {
        ReportRow {
            p: r.p,
            family: None,
            chain: None,
            params: String::new(),
            seed: None,
            f1: f1.to_string(),
            f2: f2.to_string(),
            deg1: r.deg1,
            deg2: r.deg2,
            is_jacobian: r.is_jacobian,
            jacobian_value: r.jacobian_value.to_string(),
            automorphic: r.automorphic,
            pts_inf: [r.pts_inf[0].count, r.pts_inf[1].count],
            pts_inf_mod_p: [
                r.pts_inf_mod_p[0].as_ref().map(|x| x.count),
                r.pts_inf_mod_p[1].as_ref().map(|x| x.count),
            ],
            triangle: r.triangle,
            deg_divides: r.degree_divisibility,
            low_degree_applicable: r.low_degree_applicable,
            extension_degree: r.extension_degree,
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.deg1.max(self.deg2)
    }

    fn csv_record(&self) -> Vec<String> {
        fn opt<T: ToString>(x: &Option<T>) -> String {
            x.as_ref().map(T::to_string).unwrap_or_default()
        }
        vec![
            self.p.to_string(),
            opt(&self.family),
            opt(&self.chain),
            self.params.clone(),
            opt(&self.seed),
            self.f1.clone(),
            self.f2.clone(),
            self.deg1.to_string(),
            self.deg2.to_string(),
            self.is_jacobian.to_string(),
            self.jacobian_value.clone(),
            self.automorphic.to_string(),
            self.pts_inf[0].to_string(),
            self.pts_inf[1].to_string(),
            opt(&self.pts_inf_mod_p[0]),
            opt(&self.pts_inf_mod_p[1]),
            self.triangle[0].to_string(),
            self.triangle[1].to_string(),
            self.deg_divides.to_string(),
            self.low_degree_applicable.to_string(),
            opt(&self.extension_degree),
        ]
    }
}

/// Runs one grid point.
pub fn run_point(point: &GridPoint) -> Result<ReportRow, ReportError> {
    match point {
        GridPoint::Family(spec) => {
            let tb = spec.type_b()?;
            let (f1, f2) = spec.build()?;
            let report = conjecture_report(&f1, &f2, Some(tb.extension_degree()))?;
            let mut row = ReportRow::from_report(&report, &f1, &f2);
            row.family = Some(spec.tag().to_string());
            row.params = spec.to_string();
            Ok(row)
        }
        GridPoint::Chain { kind, seed, length, budget, .. } => {
            let chain = point.chain()?.expect("chain point");
            let (f1, f2) = chain.apply()?;
            let report = conjecture_report(&f1, &f2, Some(chain.degree()?))?;
            let mut row = ReportRow::from_report(&report, &f1, &f2);
            row.family = Some(kind.tag().to_string());
            row.chain = Some(chain.to_text().trim_end().replace('\n', "; "));
            row.params = format!("length={length} budget={budget}");
            row.seed = Some(*seed);
            Ok(row)
        }
    }
}

/// Counts of predicate outcomes over a set of rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SweepSummary {
    pub rows: usize,
    pub jacobian: usize,
    pub automorphic: usize,
    /// Both members have exactly one point at infinity modulo p.
    pub one_point_mod_p: usize,
    /// Both degrees below p.
    pub low_degree: usize,
    /// Non-automorphic rows with maximum degree below p.
    pub low_degree_exceptions: usize,
}

impl SweepSummary {
    pub fn of(rows: &[ReportRow]) -> Self {
        let mut s = SweepSummary { rows: rows.len(), ..Default::default() };
        for r in rows {
            s.jacobian += r.is_jacobian as usize;
            s.automorphic += r.automorphic as usize;
            s.one_point_mod_p += (r.pts_inf_mod_p == [Some(1), Some(1)]) as usize;
            s.low_degree += r.low_degree_applicable as usize;
            s.low_degree_exceptions += (!r.automorphic && (r.max_degree() as u64) < r.p) as usize;
        }
        s
    }
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rows={} jacobian={} automorphic={} one_point_mod_p={} low_degree={} low_degree_exceptions={}",
            self.rows, self.jacobian, self.automorphic, self.one_point_mod_p, self.low_degree, self.low_degree_exceptions
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema: u32,
    pub summary: SweepSummary,
    pub rows: Vec<ReportRow>,
}

impl SweepReport {
    pub fn new(mut rows: Vec<ReportRow>) -> Self {
        rows.sort_by_cached_key(row_key);
        SweepReport { schema: SCHEMA_VERSION, summary: SweepSummary::of(&rows), rows }
    }

    pub fn to_json(&self) -> Result<String, ReportError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self, ReportError> {
        let r: SweepReport = serde_json::from_str(s)?;
        if r.schema != SCHEMA_VERSION {
            return Err(ReportError::Schema(r.schema));
        }
        Ok(r)
    }

    /// Header line plus one record per row.
    pub fn to_csv(&self) -> Result<String, ReportError> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(CSV_COLUMNS)?;
        for r in &self.rows {
            w.write_record(r.csv_record())?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
    }
}

/// Sort key of a finished row; mirrors the grid-point order.
fn row_key(r: &ReportRow) -> SortKey {
    let params = match FamilySpec::parse_line(&r.params) {
        Ok(spec) => spec.params().into_iter().map(|x| x.1).collect(),
        Err(_) => r
            .params
            .split_whitespace()
            .map(|kv| {
                let v = kv.split_once('=').map_or(kv, |x| x.1);
                v.parse().map(ParamValue::Int).unwrap_or_else(|_| ParamValue::Text(v.to_string()))
            })
            .collect(),
    };
    (r.p, r.family.clone().unwrap_or_default(), params, r.seed)
}

/// Expands and runs the grid in parallel; row order is canonical.
pub fn run_sweep(grid: &SweepGrid) -> Result<SweepReport, ReportError> {
    let points = grid.expand()?;
    let rows = points.par_iter().map(run_point).collect::<Result<Vec<_>, _>>()?;
    Ok(SweepReport::new(rows))
}

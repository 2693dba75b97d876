//! Command-line front end.
//!
//! `table` prints one statistic over a grid, `verify` compares enumeration,
//! closed forms and series on every cell, `asym` reports the large-`n`
//! estimates, and `enumerate` dumps restricted growth functions.
//!
//! Exit codes: 0 on success (including documented discrepancies), 1 on an
//! unexpected mismatch or internal failure, 2 on a usage error.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asym::{self, AsymError, AsymStat};
use crate::closedform::{ClosedFormError, ClosedForms, FormulaId, ParamKind};
use crate::combinum::{CombinumError, NumberTables};
use crate::oracle::{Oracle, OracleError, StatBundle, DEFAULT_CAP};
use crate::rgf::{self, RecordKind};
use crate::series::{self, QPoly, SeriesError, WeightSpec, XSeries};

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_MISMATCH,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::CapExceeded { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<CombinumError> for CliError {
    fn from(e: CombinumError) -> Self {
        match e {
            CombinumError::CapExceeded { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<ClosedFormError> for CliError {
    fn from(e: ClosedFormError) -> Self {
        match e {
            ClosedFormError::Table(t) => t.into(),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<AsymError> for CliError {
    fn from(e: AsymError) -> Self {
        match e {
            AsymError::NTooSmall { .. }
            | AsymError::UnknownStat(_)
            | AsymError::OffsetTooLarge { .. } => CliError::Usage(e.to_string()),
            AsymError::Table(t) => t.into(),
            other => CliError::Failed(other.to_string()),
        }
    }
}

/// Comma-separated indices and inclusive ranges: `4`, `2..6`, `1,3,10..12`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexList(pub Vec<u64>);

impl FromStr for IndexList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim) {
            if let Some((a, b)) = part.split_once("..") {
                let b = b.strip_prefix('=').unwrap_or(b);
                let a: u64 = a
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad range start in {part:?}"))?;
                let b: u64 = b
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad range end in {part:?}"))?;
                if a > b {
                    return Err(format!("empty range {part:?}"));
                }
                out.extend(a..=b);
            } else {
                out.push(part.parse().map_err(|_| format!("bad index {part:?}"))?);
            }
        }
        if out.is_empty() {
            return Err("empty index list".into());
        }
        Ok(IndexList(out))
    }
}

impl IndexList {
    fn sorted(&self) -> Vec<u64> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Anything `table` can print.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stat {
    Formula(FormulaId),
    Bell,
    Stirling2,
    Stirling1,
    MaxHeightExact,
}

impl Stat {
    pub fn name(self) -> &'static str {
        match self {
            Stat::Formula(id) => id.name(),
            Stat::Bell => "bell",
            Stat::Stirling2 => "stirling2",
            Stat::Stirling1 => "stirling1",
            Stat::MaxHeightExact => "max-height-exact",
        }
    }

    pub fn has_k(self) -> bool {
        match self {
            Stat::Formula(id) => id.has_k(),
            Stat::Bell => false,
            _ => true,
        }
    }

    pub fn param(self) -> Option<ParamKind> {
        match self {
            Stat::Formula(id) => id.param(),
            Stat::MaxHeightExact => Some(ParamKind::H),
            _ => None,
        }
    }

    /// Stirling numbers live on the full triangle `0 <= k <= n`; record
    /// statistics need at least one block.
    fn min_k(self) -> u64 {
        match self {
            Stat::Stirling1 | Stat::Stirling2 => 0,
            _ => 1,
        }
    }
}

impl fmt::Display for Stat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bell" => Ok(Stat::Bell),
            "stirling2" => Ok(Stat::Stirling2),
            "stirling1" => Ok(Stat::Stirling1),
            "max-height-exact" => Ok(Stat::MaxHeightExact),
            _ => s.parse().map(Stat::Formula),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    Closedform,
    Oracle,
    Series,
}

impl Source {
    fn label(self) -> &'static str {
        match self {
            Source::Closedform => "closedform",
            Source::Oracle => "oracle",
            Source::Series => "series",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "rgf-records",
    version,
    about = "Record-height statistics of set partitions"
)]
pub struct Cli {
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print one statistic over a grid of indices.
    Table(TableArgs),
    /// Compare enumeration, closed forms and series cell by cell.
    Verify(VerifyArgs),
    /// Large-n estimates against exact values.
    Asym(AsymArgs),
    /// List restricted growth functions, one per line.
    Enumerate(EnumerateArgs),
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Statistic name or code, or one of bell, stirling2, stirling1, max-height-exact.
    #[arg(long)]
    pub stat: Stat,
    #[arg(long)]
    pub n: IndexList,
    #[arg(long)]
    pub k: Option<IndexList>,
    /// Height-one record counts to list (default: every possible value).
    #[arg(long)]
    pub r: Option<IndexList>,
    /// Height bounds to list (default: every possible value).
    #[arg(long)]
    pub h: Option<IndexList>,
    #[arg(long, value_enum, default_value_t = Source::Closedform)]
    pub source: Source,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Largest n the enumeration oracle may be asked for.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 8)]
    pub max_n: usize,
    #[arg(long, default_value_t = 1)]
    pub min_n: usize,
    /// Restrict to these statistics (names or codes).
    #[arg(long, value_delimiter = ',')]
    pub stat: Vec<FormulaId>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    /// Add 1 to S(n,k) in the closed-form tables, given as `n,k`.
    #[arg(long, hide = true)]
    pub perturb_stirling2: Option<String>,
}

#[derive(Debug, Args)]
pub struct AsymArgs {
    /// strong-h1, strong-height, weak-h1 or weak-height; all four if omitted.
    #[arg(long, value_delimiter = ',')]
    pub stat: Vec<AsymStat>,
    #[arg(long, default_value = "50,100,200,400")]
    pub n: IndexList,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub stat: String,
    pub n: String,
    pub k: String,
    pub param: String,
    pub value: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub stat: String,
    pub n: String,
    pub k: String,
    pub param: String,
    pub oracle: String,
    pub closedform: String,
    pub series: String,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymRow {
    pub stat: String,
    pub n: String,
    pub xi: String,
    pub estimate: String,
    pub exact_ratio: String,
    pub rel_err: String,
}

pub const STATUS_AGREE: &str = "agree";
pub const STATUS_KNOWN: &str = "known-discrepancy";
pub const STATUS_MISMATCH: &str = "mismatch";

trait CsvRecord: Serialize {
    const HEADER: &'static str;
    fn fields(&self) -> Vec<&str>;
}

impl CsvRecord for TableRow {
    const HEADER: &'static str = "stat,n,k,param,value,source";
    fn fields(&self) -> Vec<&str> {
        vec![
            &self.stat,
            &self.n,
            &self.k,
            &self.param,
            &self.value,
            &self.source,
        ]
    }
}

impl CsvRecord for VerifyRow {
    const HEADER: &'static str = "stat,n,k,param,oracle,closedform,series,status";
    fn fields(&self) -> Vec<&str> {
        vec![
            &self.stat,
            &self.n,
            &self.k,
            &self.param,
            &self.oracle,
            &self.closedform,
            &self.series,
            &self.status,
        ]
    }
}

impl CsvRecord for AsymRow {
    const HEADER: &'static str = "stat,n,xi,estimate,exact_ratio,rel_err";
    fn fields(&self) -> Vec<&str> {
        vec![
            &self.stat,
            &self.n,
            &self.xi,
            &self.estimate,
            &self.exact_ratio,
            &self.rel_err,
        ]
    }
}

fn emit<R: CsvRecord>(out: &mut dyn Write, rows: &[R], format: Format) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            writeln!(out, "{}", R::HEADER)?;
            for r in rows {
                writeln!(out, "{}", r.fields().join(","))?;
            }
        }
        Format::Json => {
            let doc =
                serde_json::to_string_pretty(rows).map_err(|e| CliError::Failed(e.to_string()))?;
            writeln!(out, "{doc}")?;
        }
    }
    Ok(())
}

/// One grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub n: u64,
    pub k: Option<u64>,
    pub param: Option<u64>,
}

impl Cell {
    fn k_str(&self) -> String {
        self.k.map(|k| k.to_string()).unwrap_or_default()
    }

    fn param_str(&self, kind: Option<ParamKind>) -> String {
        match (kind, self.param) {
            (Some(kind), Some(p)) => format!("{}={p}", kind.letter()),
            _ => String::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Preset {
    AllOnes,
    HeightOne,
    TotalHeight,
    Cutoff(u32),
}

impl Preset {
    fn weights(self) -> WeightSpec {
        match self {
            Preset::AllOnes => WeightSpec::AllOnes,
            Preset::HeightOne => WeightSpec::HeightOne,
            Preset::TotalHeight => WeightSpec::TotalHeight,
            Preset::Cutoff(h) => WeightSpec::MaxCutoff(h),
        }
    }
}

type Family = Arc<Vec<XSeries<QPoly>>>;
type BundleCache = HashMap<(u64, Option<u64>), Arc<StatBundle>>;

/// The three evaluation routes, sharing enumeration results and series
/// expansions across cells.
pub struct Evaluator {
    forms: ClosedForms,
    oracle: Oracle,
    max_n: usize,
    families: Mutex<HashMap<(RecordKind, Preset), Family>>,
    bundles: Mutex<BundleCache>,
}

fn rat_to_int(v: BigRational) -> Result<BigInt, CliError> {
    if v.is_integer() {
        Ok(v.to_integer())
    } else {
        Err(CliError::Failed(format!(
            "series produced the non-integer {v}"
        )))
    }
}

impl Evaluator {
    /// `forms` must cover `max_n + 2`; series are expanded to order `max_n`.
    pub fn new(forms: ClosedForms, oracle: Oracle, max_n: usize) -> Self {
        Evaluator {
            forms,
            oracle,
            max_n,
            families: Mutex::new(HashMap::new()),
            bundles: Mutex::new(HashMap::new()),
        }
    }

    fn family(&self, kind: RecordKind, preset: Preset) -> Result<Family, CliError> {
        if let Some(f) = self
            .families
            .lock()
            .expect("series cache poisoned")
            .get(&(kind, preset))
        {
            return Ok(Arc::clone(f));
        }
        let fam = Arc::new(series::series_family(
            kind,
            self.max_n,
            self.max_n,
            &preset.weights(),
        )?);
        let mut cache = self.families.lock().expect("series cache poisoned");
        Ok(Arc::clone(cache.entry((kind, preset)).or_insert(fam)))
    }

    fn bundle(&self, n: u64, k: Option<u64>) -> Result<Arc<StatBundle>, CliError> {
        if let Some(b) = self
            .bundles
            .lock()
            .expect("oracle cache poisoned")
            .get(&(n, k))
        {
            return Ok(Arc::clone(b));
        }
        let b = Arc::new(match k {
            Some(k) => self.oracle.stats(n as usize, k as usize)?,
            None => self.oracle.stats_all(n as usize)?,
        });
        let mut cache = self.bundles.lock().expect("oracle cache poisoned");
        Ok(Arc::clone(cache.entry((n, k)).or_insert(b)))
    }

    /// `None` when the closed form is not defined at this cell.
    pub fn closedform(&self, stat: Stat, c: Cell) -> Result<Option<BigInt>, CliError> {
        match self.closedform_raw(stat, c)? {
            None => Ok(None),
            Some(v) if v.is_integer() => Ok(Some(v.to_integer())),
            Some(v) => Err(CliError::Failed(format!(
                "{stat} evaluated to the non-integer {v}"
            ))),
        }
    }

    /// Like [`Self::closedform`], but a non-integral value is returned rather
    /// than treated as an error, so `verify` can report it.
    pub fn closedform_raw(&self, stat: Stat, c: Cell) -> Result<Option<BigRational>, CliError> {
        let t = self.forms.tables();
        let (n, k, p) = (c.n as i64, c.k.map(|k| k as i64), c.param.map(|p| p as i64));
        let v = match stat {
            Stat::Bell => Ok(t.bell(n)?),
            Stat::Stirling2 => Ok(t.stirling2(n, k.unwrap_or(0))?),
            Stat::Stirling1 => Ok(t.stirling1_signed(n, k.unwrap_or(0))?),
            Stat::MaxHeightExact => self
                .forms
                .max_height_exact(n, k.unwrap_or(0), p.unwrap_or(0)),
            Stat::Formula(id) => self.forms.evaluate(id, n, k, p).map(|r| r.value),
        };
        match v {
            Ok(v) => Ok(Some(BigRational::from_integer(v))),
            Err(ClosedFormError::Domain { .. }) => Ok(None),
            Err(ClosedFormError::NonIntegral { value, .. }) => Ok(Some(value)),
            Err(e) => Err(e.into()),
        }
    }

    pub fn oracle(&self, stat: Stat, c: Cell) -> Result<BigInt, CliError> {
        use FormulaId::*;
        let p = c.param.unwrap_or(0) as usize;
        if stat == Stat::Stirling1 {
            return Err(usage("stirling1 has no enumeration route"));
        }
        let k = match (stat.has_k(), c.k) {
            (true, Some(0)) => return Ok(BigInt::from(u8::from(c.n == 0))),
            (true, Some(k)) if k > c.n => return Ok(BigInt::zero()),
            (true, k) => k,
            (false, _) => None,
        };
        let b = self.bundle(c.n, k)?;
        let v = match stat {
            Stat::Bell | Stat::Stirling2 => b.count,
            Stat::MaxHeightExact => b.max_height_exact(p),
            Stat::Stirling1 => unreachable!(),
            Stat::Formula(id) => match id {
                StrongH1Count => b.strong_h1_count(p),
                StrongH1Total | StrongH1TotalAll => b.strong_h1_total(),
                StrongHeightTotal | StrongHeightTotalAll => b.strong_total_height,
                MaxHeightAtMost => b.max_height_at_most(p),
                WeakH1Count => b.weak_h1_count(p),
                WeakH1Total | WeakH1TotalAll => b.weak_h1_total(),
                WeakHeightTotal | WeakHeightTotalAll => b.weak_total_height,
            },
        };
        Ok(BigInt::from(v))
    }

    pub fn series(&self, stat: Stat, c: Cell) -> Result<BigInt, CliError> {
        use FormulaId::*;
        use RecordKind::{Strong, Weak};
        if stat == Stat::Stirling1 {
            return Err(usage("stirling1 has no series route"));
        }
        let n = c.n as usize;
        if n > self.max_n {
            return Err(CliError::Failed(format!(
                "series expanded only to order {}",
                self.max_n
            )));
        }
        let p = c.param.unwrap_or(0);
        let one = BigRational::one();
        let ks: Vec<usize> = match c.k {
            Some(k) if k as usize > n => return Ok(BigInt::zero()),
            Some(k) => vec![k as usize],
            None => (0..=n).collect(),
        };
        // read one number out of the x^n coefficient of each P_k / Q_k and sum over k
        let read = |kind, preset, f: &dyn Fn(&QPoly) -> BigRational| -> Result<BigInt, CliError> {
            let fam = self.family(kind, preset)?;
            let mut acc = BigRational::zero();
            for &k in &ks {
                acc += f(fam[k].coeff(n)?);
            }
            rat_to_int(acc)
        };
        let at_one = |q: &QPoly| q.eval(&one);
        let slope = |q: &QPoly| q.derivative().eval(&one);
        let qr = |q: &QPoly| q.coeff(p as u32);
        match stat {
            Stat::Bell | Stat::Stirling2 => read(Strong, Preset::AllOnes, &at_one),
            Stat::MaxHeightExact => {
                let at_most = read(Strong, Preset::Cutoff(p as u32), &at_one)?;
                if p == 0 {
                    return Ok(at_most);
                }
                Ok(at_most - read(Strong, Preset::Cutoff(p as u32 - 1), &at_one)?)
            }
            Stat::Stirling1 => unreachable!(),
            Stat::Formula(id) => match id {
                StrongH1Count => read(Strong, Preset::HeightOne, &qr),
                StrongH1Total | StrongH1TotalAll => read(Strong, Preset::HeightOne, &slope),
                StrongHeightTotal | StrongHeightTotalAll => {
                    read(Strong, Preset::TotalHeight, &slope)
                }
                MaxHeightAtMost => read(Strong, Preset::Cutoff(p as u32), &at_one),
                WeakH1Count => read(Weak, Preset::HeightOne, &qr),
                WeakH1Total | WeakH1TotalAll => read(Weak, Preset::HeightOne, &slope),
                WeakHeightTotal | WeakHeightTotalAll => read(Weak, Preset::TotalHeight, &slope),
            },
        }
    }
}

/// Default parameter range for a cell: every value the statistic can take.
fn default_params(stat: Stat, n: u64, k: Option<u64>) -> Vec<u64> {
    let k = k.unwrap_or(n);
    match stat {
        Stat::Formula(FormulaId::StrongH1Count) => (0..k.max(1)).collect(),
        Stat::Formula(FormulaId::WeakH1Count) => (0..n.max(1)).collect(),
        Stat::Formula(FormulaId::MaxHeightAtMost) => (1..k).collect(),
        Stat::MaxHeightExact => (0..k.max(1)).collect(),
        _ => vec![],
    }
}

fn grid(stat: Stat, ns: &[u64], ks: Option<&[u64]>, params: Option<&[u64]>) -> Vec<Cell> {
    let mut cells = Vec::new();
    for &n in ns {
        let k_vals: Vec<Option<u64>> = match ks {
            Some(ks) => ks
                .iter()
                .filter(|&&k| k >= stat.min_k() && k <= n)
                .map(|&k| Some(k))
                .collect(),
            None if stat.has_k() => (stat.min_k()..=n).map(Some).collect(),
            None => vec![None],
        };
        for k in k_vals {
            if stat.param().is_none() {
                cells.push(Cell { n, k, param: None });
                continue;
            }
            let ps = params
                .map(<[u64]>::to_vec)
                .unwrap_or_else(|| default_params(stat, n, k));
            cells.extend(ps.into_iter().map(|p| Cell {
                n,
                k,
                param: Some(p),
            }));
        }
    }
    cells.sort();
    cells
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Failed(e.to_string()))?;
    Ok(pool.install(f))
}

pub fn table_rows(args: &TableArgs) -> Result<Vec<TableRow>, CliError> {
    let stat = args.stat;
    if !stat.has_k() && args.k.is_some() {
        return Err(usage(format!(
            "{stat} is a total over all block counts and takes no --k"
        )));
    }
    let (want, other) = match stat.param() {
        Some(ParamKind::R) => (&args.r, &args.h),
        Some(ParamKind::H) => (&args.h, &args.r),
        None if args.r.is_some() || args.h.is_some() => {
            return Err(usage(format!("{stat} takes neither --r nor --h")));
        }
        None => (&None, &None),
    };
    if other.is_some() {
        let letter = stat.param().map(ParamKind::letter).unwrap_or('r');
        return Err(usage(format!("{stat} is parameterised by --{letter} only")));
    }
    let ns = args.n.sorted();
    let ks = args.k.as_ref().map(IndexList::sorted);
    let ps = want.as_ref().map(IndexList::sorted);
    let max_n = *ns.last().expect("index lists are nonempty") as usize;
    if args.source == Source::Oracle && max_n > args.cap {
        return Err(usage(format!(
            "n = {max_n} exceeds the enumeration cap of {}",
            args.cap
        )));
    }
    if stat == Stat::Stirling1 && args.source != Source::Closedform {
        return Err(usage("stirling1 is only available from the closed form"));
    }
    let forms = ClosedForms::for_max_n(max_n)?;
    let series_order = if args.source == Source::Series {
        max_n
    } else {
        0
    };
    let eval = Evaluator::new(forms, Oracle::with_cap(args.cap), series_order);
    let cells = grid(stat, &ns, ks.as_deref(), ps.as_deref());
    let rows: Vec<Result<TableRow, CliError>> = cells
        .par_iter()
        .map(|&c| {
            let (value, source) = match args.source {
                Source::Oracle => (eval.oracle(stat, c)?, Source::Oracle),
                Source::Series => (eval.series(stat, c)?, Source::Series),
                Source::Closedform => match eval.closedform(stat, c)? {
                    Some(v) => (v, Source::Closedform),
                    None if c.n as usize <= args.cap => (eval.oracle(stat, c)?, Source::Oracle),
                    None => {
                        return Err(usage(format!(
                            "{stat} has no closed form at n={}, k={}, {}",
                            c.n,
                            c.k_str(),
                            c.param_str(stat.param())
                        )))
                    }
                },
            };
            Ok(TableRow {
                stat: stat.name().to_string(),
                n: c.n.to_string(),
                k: c.k_str(),
                param: c.param_str(stat.param()),
                value: value.to_string(),
                source: source.label().to_string(),
            })
        })
        .collect();
    rows.into_iter().collect()
}

fn parse_perturbation(spec: &str) -> Result<(usize, usize), CliError> {
    let bad = || usage(format!("--perturb-stirling2 expects n,k, got {spec:?}"));
    let (n, k) = spec.split_once(',').ok_or_else(bad)?;
    Ok((
        n.trim().parse().map_err(|_| bad())?,
        k.trim().parse().map_err(|_| bad())?,
    ))
}

/// Closed-form evaluator for `verify`, optionally with `S(n,k)` bumped by one.
pub fn verify_forms(
    max_n: usize,
    perturb: Option<(usize, usize)>,
) -> Result<ClosedForms, CliError> {
    let forms = ClosedForms::for_max_n(max_n)?;
    let Some((n, k)) = perturb else {
        return Ok(forms);
    };
    let t: &NumberTables = forms.tables();
    if n > t.max_n() || k > n {
        return Err(usage(format!(
            "cannot perturb S({n},{k}): outside the table"
        )));
    }
    Ok(ClosedForms::with_tables(Arc::new(
        t.with_stirling2_offset(n, k, 1),
    )))
}

fn status(id: FormulaId, oracle: &BigInt, closed: &BigRational, series: &BigInt) -> &'static str {
    let closed_agrees = closed.is_integer() && closed.to_integer() == *oracle;
    if closed_agrees && oracle == series {
        STATUS_AGREE
    } else if id.is_documented_discrepancy() && oracle == series {
        STATUS_KNOWN
    } else {
        STATUS_MISMATCH
    }
}

/// Three-way comparison over `min_n..=max_n`, every `k` and every parameter
/// value, for the given statistics (all eleven if empty). Cells where a
/// formula is undefined are skipped. Rows come out grouped by statistic and
/// ordered by `(n, k, param)` within each group.
pub fn verify_rows(
    forms: ClosedForms,
    stats: &[FormulaId],
    min_n: usize,
    max_n: usize,
    cap: usize,
) -> Result<Vec<VerifyRow>, CliError> {
    if min_n > max_n {
        return Err(usage(format!("empty n range {min_n}..{max_n}")));
    }
    if max_n > cap {
        return Err(usage(format!(
            "max n = {max_n} exceeds the enumeration cap of {cap}"
        )));
    }
    let stats: Vec<FormulaId> = if stats.is_empty() {
        FormulaId::ALL.to_vec()
    } else {
        stats.to_vec()
    };
    let ns: Vec<u64> = (min_n.max(1) as u64..=max_n as u64).collect();
    let eval = Evaluator::new(forms, Oracle::with_cap(cap), max_n);

    let jobs: Vec<(FormulaId, Cell)> = stats
        .iter()
        .flat_map(|&id| {
            grid(Stat::Formula(id), &ns, None, None)
                .into_iter()
                .map(move |c| (id, c))
        })
        .collect();
    let rows: Vec<Result<Option<VerifyRow>, CliError>> = jobs
        .par_iter()
        .map(|&(id, c)| {
            let stat = Stat::Formula(id);
            let Some(closed) = eval.closedform_raw(stat, c)? else {
                return Ok(None);
            };
            let oracle = eval.oracle(stat, c)?;
            let series = eval.series(stat, c)?;
            Ok(Some(VerifyRow {
                stat: id.code().to_string(),
                n: c.n.to_string(),
                k: c.k_str(),
                param: c.param_str(id.param()),
                status: status(id, &oracle, &closed, &series).to_string(),
                oracle: oracle.to_string(),
                closedform: closed.to_string(),
                series: series.to_string(),
            }))
        })
        .collect();
    let rows: Vec<Option<VerifyRow>> = rows.into_iter().collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// 1 if any row is an unexplained mismatch.
pub fn verify_exit_code(rows: &[VerifyRow]) -> u8 {
    if rows.iter().any(|r| r.status == STATUS_MISMATCH) {
        EXIT_MISMATCH
    } else {
        EXIT_OK
    }
}

/// Per-statistic tallies of row statuses, for the stderr summary.
pub fn verify_summary(rows: &[VerifyRow]) -> BTreeMap<(String, String), usize> {
    let mut m = BTreeMap::new();
    for r in rows {
        *m.entry((r.stat.clone(), r.status.clone())).or_insert(0) += 1;
    }
    m
}

pub fn asym_rows(args: &AsymArgs) -> Result<Vec<AsymRow>, CliError> {
    if let Some(&n) = args.n.0.iter().find(|&&n| n < 2) {
        return Err(usage(format!("asymptotic estimates need n >= 2, got {n}")));
    }
    let stats = if args.stat.is_empty() {
        AsymStat::ALL.to_vec()
    } else {
        args.stat.clone()
    };
    let mut rows = Vec::new();
    for stat in stats {
        for e in asym::estimates(stat, &args.n.0)? {
            rows.push(AsymRow {
                stat: stat.name().to_string(),
                n: e.n.to_string(),
                xi: e.xi.to_string(),
                estimate: e.estimate.to_string(),
                exact_ratio: e.exact_ratio.to_string(),
                rel_err: e.rel_err.to_string(),
            });
        }
    }
    Ok(rows)
}

fn enumerate(args: &EnumerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.n > args.cap {
        return Err(usage(format!(
            "n = {} exceeds the enumeration cap of {}",
            args.n, args.cap
        )));
    }
    match args.k {
        Some(k) if k > args.n => Err(usage(format!("k = {k} exceeds n = {}", args.n))),
        Some(k) => Ok(rgf::write_words(out, rgf::enumerate(args.n, k))?),
        None => Ok(rgf::write_words(out, rgf::enumerate_all(args.n))?),
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, CliError> {
    let threads = cli.threads;
    match &cli.command {
        Command::Table(args) => {
            let rows = with_pool(threads, || table_rows(args))??;
            emit(out, &rows, args.format)?;
        }
        Command::Verify(args) => {
            let perturb = args
                .perturb_stirling2
                .as_deref()
                .map(parse_perturbation)
                .transpose()?;
            if args.max_n > args.cap {
                return Err(usage(format!(
                    "max n = {} exceeds the enumeration cap of {}",
                    args.max_n, args.cap
                )));
            }
            let forms = verify_forms(args.max_n, perturb)?;
            let rows = with_pool(threads, || {
                verify_rows(forms, &args.stat, args.min_n, args.max_n, args.cap)
            })??;
            emit(out, &rows, args.format)?;
            for ((stat, st), count) in verify_summary(&rows) {
                if st != STATUS_AGREE {
                    writeln!(err, "{stat}: {count} {st}")?;
                }
            }
            return Ok(verify_exit_code(&rows));
        }
        Command::Asym(args) => {
            let rows = asym_rows(args)?;
            emit(out, &rows, args.format)?;
        }
        Command::Enumerate(args) => enumerate(args, out)?,
    }
    Ok(EXIT_OK)
}

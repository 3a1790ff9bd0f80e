//! Bounded sequences with pointwise and dyadic-block evaluation, finite
//! truncations, decreasing rearrangement and the two ideal norms.
//!
//! Indexing is 0-based. Block `n` covers indices `[2^n - 1, 2^{n+1} - 2]`,
//! so block `n` has `2^n` entries and its right endpoint `2^{n+1} - 2`
//! satisfies `log(endpoint + 2) = (n + 1) log 2`.

use std::fmt;
use std::io::BufRead;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::summation::{pairwise_sum, prefix_sums, SummationMode};

/// Largest block that pointwise summation will expand; blocks `0..=29`
/// together span `2^30 - 1` indices.
pub const MAX_POINTWISE_BLOCK: usize = 29;

/// A finite window of a sequence on which the estimators run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Truncation {
    values: Vec<f64>,
    mode: SummationMode,
}

impl Truncation {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyTruncation);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Truncation {
            values,
            mode: SummationMode::default(),
        })
    }

    pub fn from_fn(len: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((0..len).map(f).collect())
    }

    pub fn with_mode(mut self, mode: SummationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mode(&self) -> SummationMode {
        self.mode
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `max |x_n|` over the window.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Same summation mode, new values (validated).
    pub(crate) fn derive(&self, values: Vec<f64>) -> Result<Self> {
        Ok(Truncation::new(values)?.with_mode(self.mode))
    }
}

/// Which evaluation routes a sequence supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Granularity {
    Pointwise,
    BlockOnly,
    Both,
}

impl Granularity {
    pub fn has_pointwise(self) -> bool {
        matches!(self, Granularity::Pointwise | Granularity::Both)
    }

    pub fn has_blocks(self) -> bool {
        matches!(self, Granularity::BlockOnly | Granularity::Both)
    }
}

/// First index of block `n` (requires `n < 64`).
pub fn block_start(n: usize) -> u64 {
    (1u64 << n) - 1
}

/// Last index of block `n` (requires `n < 63`).
pub fn block_end(n: usize) -> u64 {
    (1u64 << (n + 1)) - 2
}

/// Block containing index `k`, i.e. `floor(log2(k + 1))`.
pub fn block_of_index(k: u64) -> usize {
    match k.checked_add(1) {
        Some(k1) => (u64::BITS - 1 - k1.leading_zeros()) as usize,
        None => 64,
    }
}

/// A bounded sequence that can be evaluated pointwise, by exact dyadic block
/// aggregates, or both.
pub trait BlockSequence: Send + Sync + fmt::Debug {
    fn granularity(&self) -> Granularity;

    /// `x_index`, when pointwise evaluation is feasible.
    fn value_at(&self, _index: u64) -> Option<f64> {
        None
    }

    /// `sum_{k = 2^n - 1}^{2^{n+1} - 2} x_k`.
    fn block_sum_at(&self, block: usize) -> Result<f64> {
        pointwise_block_sum(self, block)
    }

    /// `((i+1)|x_i|, (j+1)|x_j|)` at the two endpoints `i = 2^n - 1`,
    /// `j = 2^{n+1} - 2` of block `n`. Returned already weighted so that
    /// block-only generators can stay in exponent space.
    fn block_edge_weights(&self, block: usize) -> Option<(f64, f64)> {
        if block >= 62 || !self.granularity().has_pointwise() {
            return None;
        }
        let (i, j) = (block_start(block), block_end(block));
        let a = self.value_at(i)?.abs() * (i as f64 + 1.0);
        let b = self.value_at(j)?.abs() * (j as f64 + 1.0);
        Some((a, b))
    }

    /// Certified bound on `sup |x_n|`; infinite when unvalidated.
    fn sup_bound(&self) -> f64 {
        f64::INFINITY
    }

    /// Number of blocks that can be evaluated, when finite.
    fn available_blocks(&self) -> Option<usize> {
        None
    }

    /// Number of pointwise values, when finite.
    fn pointwise_len(&self) -> Option<u64> {
        None
    }

    fn label(&self) -> String {
        format!("{self:?}")
    }
}

/// Block sum by expanding the block pointwise (pairwise summation).
pub fn pointwise_block_sum<S: BlockSequence + ?Sized>(seq: &S, block: usize) -> Result<f64> {
    if block > MAX_POINTWISE_BLOCK {
        return Err(Error::PointwiseRangeExceeded { block });
    }
    let start = block_start(block);
    let mut buf = Vec::with_capacity(1usize << block);
    for k in start..=block_end(block) {
        buf.push(seq.value_at(k).ok_or(Error::NotPointwise { index: k })?);
    }
    Ok(pairwise_sum(&buf))
}

impl<T: BlockSequence + ?Sized> BlockSequence for Arc<T> {
    fn granularity(&self) -> Granularity {
        (**self).granularity()
    }
    fn value_at(&self, index: u64) -> Option<f64> {
        (**self).value_at(index)
    }
    fn block_sum_at(&self, block: usize) -> Result<f64> {
        (**self).block_sum_at(block)
    }
    fn block_edge_weights(&self, block: usize) -> Option<(f64, f64)> {
        (**self).block_edge_weights(block)
    }
    fn sup_bound(&self) -> f64 {
        (**self).sup_bound()
    }
    fn available_blocks(&self) -> Option<usize> {
        (**self).available_blocks()
    }
    fn pointwise_len(&self) -> Option<u64> {
        (**self).pointwise_len()
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

/// A stored column of numbers read as pointwise values or as block sums.
#[derive(Clone)]
pub struct TabulatedSequence {
    values: Arc<Vec<f64>>,
    granularity: Granularity,
    label: String,
}

impl fmt::Debug for TabulatedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TabulatedSequence")
            .field("len", &self.values.len())
            .field("granularity", &self.granularity)
            .field("label", &self.label)
            .finish()
    }
}

impl TabulatedSequence {
    /// `granularity` must be `Pointwise` or `BlockOnly`.
    pub fn new(values: Vec<f64>, granularity: Granularity, label: impl Into<String>) -> Self {
        let granularity = match granularity {
            Granularity::Both => Granularity::Pointwise,
            g => g,
        };
        TabulatedSequence {
            values: Arc::new(values),
            granularity,
            label: label.into(),
        }
    }

    pub fn pointwise(values: Vec<f64>) -> Self {
        Self::new(values, Granularity::Pointwise, "tabulated")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl BlockSequence for TabulatedSequence {
    fn granularity(&self) -> Granularity {
        self.granularity
    }

    fn value_at(&self, index: u64) -> Option<f64> {
        match self.granularity {
            Granularity::BlockOnly => None,
            _ => usize::try_from(index).ok().and_then(|i| self.values.get(i).copied()),
        }
    }

    fn block_sum_at(&self, block: usize) -> Result<f64> {
        let available = self.available_blocks().unwrap_or(0);
        if block >= available {
            return Err(Error::InsufficientBlocks { block, available });
        }
        match self.granularity {
            Granularity::BlockOnly => Ok(self.values[block]),
            _ => {
                let s = block_start(block) as usize;
                let e = block_end(block) as usize;
                Ok(pairwise_sum(&self.values[s..=e]))
            }
        }
    }

    fn sup_bound(&self) -> f64 {
        match self.granularity {
            Granularity::BlockOnly => f64::INFINITY,
            _ => self.values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    fn available_blocks(&self) -> Option<usize> {
        Some(match self.granularity {
            Granularity::BlockOnly => self.values.len(),
            // complete blocks: 2^B - 1 <= len
            _ => block_of_index(self.values.len() as u64),
        })
    }

    fn pointwise_len(&self) -> Option<u64> {
        match self.granularity {
            Granularity::BlockOnly => None,
            _ => Some(self.values.len() as u64),
        }
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `|x|` sorted nonincreasing.
pub fn decreasing_rearrangement(x: &Truncation) -> Truncation {
    let mut v: Vec<f64> = x.values().iter().map(|a| a.abs()).collect();
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    Truncation { values: v, mode: x.mode() }
}

/// Moduli of a complex window sorted nonincreasing.
pub fn decreasing_rearrangement_complex(x: &[Complex64]) -> Result<Truncation> {
    let mut v: Vec<f64> = x.iter().map(|z| z.norm()).collect();
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    Truncation::new(v)
}

/// A supremum evaluated over a finite window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    /// Index (or block) at which the running maximum was last raised.
    pub argmax: usize,
    /// Running maximum still attained in the final 10% of the window.
    pub possibly_divergent: bool,
}

fn late(argmax: usize, len: usize) -> bool {
    len >= 10 && argmax * 10 >= len * 9
}

/// `sup_n (n+1) x*_n` over the window.
pub fn quasi_norm_l1inf(x: &Truncation) -> NormEstimate {
    let r = decreasing_rearrangement(x);
    let (mut best, mut arg) = (0.0, 0);
    for (n, &v) in r.values().iter().enumerate() {
        let w = (n as f64 + 1.0) * v;
        if w > best {
            best = w;
            arg = n;
        }
    }
    NormEstimate {
        value: best,
        argmax: arg,
        possibly_divergent: late(arg, r.len()),
    }
}

/// Quasi-norm of a nonincreasing sequence read at the block endpoints of
/// blocks `0..n_blocks`. Exact whenever the sequence is constant inside each
/// block apart from its first index (true for every dyadic generator here).
pub fn quasi_norm_l1inf_blocks(seq: &dyn BlockSequence, n_blocks: usize) -> Result<NormEstimate> {
    let (mut best, mut arg) = (0.0, 0);
    for m in 0..n_blocks {
        let (a, b) = seq.block_edge_weights(m).ok_or_else(|| {
            Error::Precondition(format!("block {m} has no endpoint evaluation"))
        })?;
        let w = a.max(b);
        if w > best {
            best = w;
            arg = m;
        }
    }
    Ok(NormEstimate {
        value: best,
        argmax: arg,
        possibly_divergent: late(arg, n_blocks),
    })
}

/// `sup_n (1/log(n+2)) sum_{k<=n} x*_k` over the window.
pub fn norm_m1inf(x: &Truncation) -> NormEstimate {
    let r = decreasing_rearrangement(x);
    let ps = prefix_sums(r.values(), r.mode());
    let (mut best, mut arg) = (0.0, 0);
    for (n, &s) in ps.iter().enumerate() {
        let w = s / (n as f64 + 2.0).ln();
        if w > best {
            best = w;
            arg = n;
        }
    }
    NormEstimate {
        value: best,
        argmax: arg,
        possibly_divergent: late(arg, r.len()),
    }
}

/// Block-mode M_{1,inf} norm: partial sums at the right endpoints
/// `2^{m+1} - 2`, normalised by `log(2^{m+1}) = (m+1) log 2`. The input must
/// already be nonnegative and nonincreasing. Returns the estimate together
/// with every evaluated prefix ratio.
pub fn norm_m1inf_blocks(
    seq: &dyn BlockSequence,
    n_blocks: usize,
) -> Result<(NormEstimate, Vec<f64>)> {
    let mut sums = Vec::with_capacity(n_blocks);
    for m in 0..n_blocks {
        sums.push(seq.block_sum_at(m)?);
    }
    let prefix = prefix_sums(&sums, SummationMode::Compensated);
    let ratios: Vec<f64> = prefix
        .iter()
        .enumerate()
        .map(|(m, s)| s / ((m as f64 + 1.0) * std::f64::consts::LN_2))
        .collect();
    let (mut best, mut arg) = (0.0, 0);
    for (m, &w) in ratios.iter().enumerate() {
        if w > best {
            best = w;
            arg = m;
        }
    }
    Ok((
        NormEstimate {
            value: best,
            argmax: arg,
            possibly_divergent: late(arg, n_blocks),
        },
        ratios,
    ))
}

/// `y_n = sum_{k<=n} x_k` with the truncation's summation mode.
pub fn partial_sums(x: &Truncation) -> Truncation {
    Truncation {
        values: prefix_sums(x.values(), x.mode()),
        mode: x.mode(),
    }
}

/// A user sequence read from the line-oriented CSV format: one scalar (or
/// `re,im` pair) per line, optional header `# granularity=pointwise|block`.
#[derive(Debug, Clone)]
pub struct CsvSequence {
    pub granularity: Granularity,
    pub re: Vec<f64>,
    pub im: Option<Vec<f64>>,
}

impl CsvSequence {
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut granularity = Granularity::Pointwise;
        let mut re = Vec::new();
        let mut im: Vec<f64> = Vec::new();
        let mut complex = false;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(comment) = t.strip_prefix('#') {
                if let Some(g) = comment.trim().strip_prefix("granularity=") {
                    granularity = match g.trim() {
                        "pointwise" => Granularity::Pointwise,
                        "block" => Granularity::BlockOnly,
                        other => {
                            return Err(Error::Parse {
                                line: lineno,
                                message: format!("unknown granularity `{other}`"),
                            })
                        }
                    };
                }
                continue;
            }
            let num = |s: &str| -> Result<f64> {
                let v: f64 = s.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("not a number: `{}`", s.trim()),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "non-finite value".into(),
                    });
                }
                Ok(v)
            };
            let mut parts = t.split(',');
            let a = num(parts.next().unwrap_or(""))?;
            let b = parts.next().map(num).transpose()?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    message: "expected `value` or `re,im`".into(),
                });
            }
            if b.is_some() && !complex {
                complex = true;
                im.resize(re.len(), 0.0);
            }
            re.push(a);
            if complex {
                im.push(b.unwrap_or(0.0));
            }
        }
        if re.is_empty() {
            return Err(Error::EmptyTruncation);
        }
        Ok(CsvSequence {
            granularity,
            re,
            im: complex.then_some(im),
        })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let f = std::fs::File::open(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(std::io::BufReader::new(f))
    }

    pub fn is_complex(&self) -> bool {
        self.im.is_some()
    }

    pub fn real_part(&self, label: &str) -> TabulatedSequence {
        TabulatedSequence::new(self.re.clone(), self.granularity, label)
    }

    pub fn imag_part(&self, label: &str) -> Option<TabulatedSequence> {
        self.im
            .as_ref()
            .map(|im| TabulatedSequence::new(im.clone(), self.granularity, label))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[f64]) -> Truncation {
        Truncation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn block_layout() {
        assert_eq!((block_start(0), block_end(0)), (0, 0));
        assert_eq!((block_start(3), block_end(3)), (7, 14));
        for k in 0..200u64 {
            let b = block_of_index(k);
            assert!(block_start(b) <= k && k <= block_end(b));
        }
        assert_eq!(block_of_index(u64::MAX - 1), 63);
    }

    #[test]
    fn rearrangement_sorts_moduli() {
        let r = decreasing_rearrangement(&t(&[1.0, 3.0, 2.0]));
        assert_eq!(r.values(), &[3.0, 2.0, 1.0]);
        let h: Vec<f64> = (0..50).map(|n| 1.0 / (n as f64 + 1.0)).collect();
        assert_eq!(decreasing_rearrangement(&t(&h)).values(), &h[..]);
        let r = decreasing_rearrangement(&t(&[-4.0, 1.0, -2.0]));
        assert_eq!(r.values(), &[4.0, 2.0, 1.0]);
    }

    #[test]
    fn complex_rearrangement_uses_modulus() {
        let z = [Complex64::new(0.0, 1.0), Complex64::new(3.0, 4.0), Complex64::new(-2.0, 0.0)];
        assert_eq!(decreasing_rearrangement_complex(&z).unwrap().values(), &[5.0, 2.0, 1.0]);
    }

    #[test]
    fn quasi_norm_examples() {
        let h = Truncation::from_fn(1000, |n| 1.0 / (n as f64 + 1.0)).unwrap();
        let q = quasi_norm_l1inf(&h);
        assert!((q.value - 1.0).abs() < 1e-12);
        let sq = Truncation::from_fn(1000, |n| 1.0 / ((n as f64 + 1.0).powi(2))).unwrap();
        let q = quasi_norm_l1inf(&sq);
        assert_eq!((q.value, q.argmax), (1.0, 0));
        assert!(!q.possibly_divergent);
    }

    #[test]
    fn quasi_norm_flags_late_maximum() {
        let x = Truncation::from_fn(100, |n| (n as f64 + 1.0).sqrt().recip()).unwrap();
        assert!(quasi_norm_l1inf(&x).possibly_divergent);
    }

    #[test]
    fn m1inf_harmonic_brackets() {
        // brute force: partial harmonic sums over log(n+2), sup over the window
        for &n in &[1usize << 10, 1 << 14, 1 << 18] {
            let h = Truncation::from_fn(n, |k| 1.0 / (k as f64 + 1.0)).unwrap();
            let v = norm_m1inf(&h).value;
            let mut best: f64 = 0.0;
            let mut s = 0.0;
            for k in 0..n {
                s += 1.0 / (k as f64 + 1.0);
                best = best.max(s / (k as f64 + 2.0).ln());
            }
            assert!((v - best).abs() < 1e-12);
            // the ratio decreases from its first term 1/log 2
            assert!((v - std::f64::consts::LOG2_E).abs() < 1e-15, "{v}");
        }
        let z = Truncation::new(vec![0.0; 16]).unwrap();
        assert_eq!(norm_m1inf(&z).value, 0.0);
    }

    #[test]
    fn partial_sum_examples() {
        assert_eq!(partial_sums(&t(&[1.0, 1.0, 1.0])).values(), &[1.0, 2.0, 3.0]);
        let alt = Truncation::from_fn(64, |n| if n % 2 == 0 { 1.0 } else { -1.0 }).unwrap();
        assert_eq!(*partial_sums(&alt).values().last().unwrap(), 0.0);
    }

    #[test]
    fn harmonic_partial_sum_matches_extended_precision() {
        // H_{2^20} = 14.44015975293752146085... (40-digit mpmath), rounded to f64
        const H_2_20: f64 = 14.440_159_752_937_522;
        for mode in [SummationMode::Pairwise, SummationMode::Compensated] {
            let h = Truncation::from_fn(1 << 20, |n| 1.0 / (n as f64 + 1.0))
                .unwrap()
                .with_mode(mode);
            let last = *partial_sums(&h).values().last().unwrap();
            assert!((last - H_2_20).abs() < 1e-10, "{mode:?}: {last}");
        }
    }

    #[test]
    fn truncation_rejects_bad_input() {
        assert_eq!(Truncation::new(vec![]), Err(Error::EmptyTruncation));
        assert!(matches!(
            Truncation::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1, .. })
        ));
    }

    #[test]
    fn tabulated_block_sums() {
        let s = TabulatedSequence::pointwise((0..7).map(|k| k as f64).collect());
        assert_eq!(s.available_blocks(), Some(3));
        assert_eq!(s.block_sum_at(1).unwrap(), 3.0);
        assert_eq!(s.block_sum_at(2).unwrap(), 3.0 + 4.0 + 5.0 + 6.0);
        assert!(matches!(s.block_sum_at(3), Err(Error::InsufficientBlocks { .. })));
        let b = TabulatedSequence::new(vec![0.5, 0.25], Granularity::BlockOnly, "b");
        assert_eq!(b.block_sum_at(1).unwrap(), 0.25);
        assert_eq!(b.value_at(0), None);
    }

    #[test]
    fn csv_parsing() {
        let src = "# granularity=block\n1.5\n\n2.5\n";
        let c = CsvSequence::parse(src.as_bytes()).unwrap();
        assert_eq!(c.granularity, Granularity::BlockOnly);
        assert_eq!(c.re, vec![1.5, 2.5]);
        assert!(!c.is_complex());

        let c = CsvSequence::parse("1\n2,3\n-1,0.5\n".as_bytes()).unwrap();
        assert_eq!(c.im, Some(vec![0.0, 3.0, 0.5]));
        assert_eq!(c.granularity, Granularity::Pointwise);

        let e = CsvSequence::parse("1\nabc\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(CsvSequence::parse("# granularity=weird\n1\n".as_bytes()).is_err());
    }
}

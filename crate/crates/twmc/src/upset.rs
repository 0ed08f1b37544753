//! Ultimately periodic sets of natural numbers.
//!
//! A counting modality ◇^S needs to ask "is the number of witnessing edge
//! accesses a member of S?" for sets S like `{2}`, `>=1`, or `even`. Every
//! such set is *ultimately periodic*: membership of n is determined by a
//! finite prefix below a threshold N together with a repeating pattern of
//! period k from N onwards. This makes the map n ↦ membership-relevant-value
//! factor through the finite commutative monoid {0, …, N+k−1} with truncated
//! addition, which is what lets a dynamic program track "how many witnesses
//! so far" in constant space.

use std::fmt;

use crate::{Error, Result};

/// An ultimately periodic set S ⊆ ℕ, represented by a threshold `N`, a
/// period `k ≥ 1` and membership bits for `0..N+k`. For `n ≥ N`,
/// membership of `n` equals the bit at `N + (n − N) mod k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpSet {
    threshold: usize,
    period: usize,
    bits: Vec<bool>,
}

/// An element of the monoid induced by an [`UpSet`]: a value in
/// `0..N+k` that abstracts a natural number up to S-membership under
/// further addition. Only meaningful together with the set that produced it.
pub type MonoidElem = u16;

impl UpSet {
    /// Builds a set from raw parts. The representation is kept as given
    /// (call [`UpSet::canonicalize`] for the minimal one); `period` must be
    /// positive and `bits` must have length `threshold + period`.
    pub fn new(threshold: usize, period: usize, bits: Vec<bool>) -> Result<Self> {
        if period == 0 {
            return Err(Error::ParseUpSet {
                text: format!("up({threshold},{period};..)"),
                reason: "period must be at least 1".into(),
            });
        }
        if bits.len() != threshold + period {
            return Err(Error::ParseUpSet {
                text: format!("up({threshold},{period};..)"),
                reason: format!(
                    "expected {} membership bits, got {}",
                    threshold + period,
                    bits.len()
                ),
            });
        }
        Ok(Self { threshold, period, bits })
    }

    /// The finite set `{a, b, …}` (threshold max+1, period 1, empty tail).
    pub fn finite(elems: &[usize]) -> Self {
        let threshold = elems.iter().map(|&e| e + 1).max().unwrap_or(0);
        let mut bits = vec![false; threshold + 1];
        for &e in elems {
            bits[e] = true;
        }
        Self { threshold, period: 1, bits }.canonicalize()
    }

    /// The set `{n, n+1, …}`.
    pub fn at_least(n: usize) -> Self {
        let mut bits = vec![false; n + 1];
        bits[n] = true;
        Self { threshold: n, period: 1, bits }.canonicalize()
    }

    /// The set of all positive naturals; the default for a bare ◇.
    pub fn positive() -> Self {
        Self::at_least(1)
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Size of the monoid carrier, `N + k`.
    pub fn carrier_size(&self) -> usize {
        self.threshold + self.period
    }

    /// Membership test for an arbitrary natural number.
    pub fn contains(&self, n: usize) -> bool {
        self.bits[self.project(n)]
    }

    /// The monoid image of `n`: `n` itself below `N+k`, otherwise folded
    /// into the periodic tail.
    pub fn hom(&self, n: usize) -> MonoidElem {
        self.project(n) as MonoidElem
    }

    /// The monoid identity, `hom(0)`.
    pub fn identity(&self) -> MonoidElem {
        0
    }

    /// Monoid addition: `madd(hom(a), hom(b)) == hom(a + b)` for all a, b.
    pub fn madd(&self, a: MonoidElem, b: MonoidElem) -> MonoidElem {
        self.project(a as usize + b as usize) as MonoidElem
    }

    /// Whether a monoid element denotes numbers belonging to the set.
    pub fn accepts(&self, e: MonoidElem) -> bool {
        self.bits[e as usize]
    }

    fn project(&self, n: usize) -> usize {
        if n < self.threshold + self.period {
            n
        } else {
            self.threshold + (n - self.threshold) % self.period
        }
    }

    /// The unique minimal representation of the same set: smallest period
    /// first, then smallest threshold. Two `UpSet`s denote the same set of
    /// naturals iff their canonical forms are equal.
    pub fn canonicalize(&self) -> Self {
        // Minimal eventual period divides the current one.
        let mut period = self.period;
        for d in 1..=self.period {
            if self.period % d == 0
                && (self.threshold..self.threshold + self.period)
                    .all(|i| self.contains(i) == self.contains(i + d))
            {
                period = d;
                break;
            }
        }
        // Slide the threshold down while the prefix already repeats.
        let mut threshold = self.threshold;
        while threshold > 0 && self.contains(threshold - 1) == self.contains(threshold - 1 + period)
        {
            threshold -= 1;
        }
        let bits = (0..threshold + period).map(|i| self.contains(i)).collect();
        Self { threshold, period, bits }
    }

    /// Parses a counting-set literal. Accepted forms: `{a,b,…}` (finite,
    /// possibly empty), `>=n`, `<=n`, `==n`, `even`, `odd`, and the raw form
    /// `up(N,k;bits)` with `N+k` bits, most significant first for index 0.
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        let err = |reason: &str| Error::ParseUpSet { text: s.to_string(), reason: reason.into() };

        if let Some(body) = s.strip_prefix('{') {
            let body = body.strip_suffix('}').ok_or_else(|| err("missing closing `}`"))?;
            let mut elems = Vec::new();
            for part in body.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    if body.trim().is_empty() {
                        break; // `{}` is the empty set
                    }
                    return Err(err("empty element in set"));
                }
                let v: usize = part.parse().map_err(|_| err("set elements must be naturals"))?;
                elems.push(v);
            }
            return Ok(Self::finite(&elems));
        }
        if let Some(n) = s.strip_prefix(">=") {
            let n: usize = n.trim().parse().map_err(|_| err("expected a natural after >="))?;
            return Ok(Self::at_least(n));
        }
        if let Some(n) = s.strip_prefix("<=") {
            let n: usize = n.trim().parse().map_err(|_| err("expected a natural after <="))?;
            return Ok(Self::finite(&(0..=n).collect::<Vec<_>>()));
        }
        if let Some(n) = s.strip_prefix("==") {
            let n: usize = n.trim().parse().map_err(|_| err("expected a natural after =="))?;
            return Ok(Self::finite(&[n]));
        }
        if s == "even" {
            return Ok(Self { threshold: 0, period: 2, bits: vec![true, false] });
        }
        if s == "odd" {
            return Ok(Self { threshold: 0, period: 2, bits: vec![false, true] });
        }
        if let Some(body) = s.strip_prefix("up(") {
            let body = body.strip_suffix(')').ok_or_else(|| err("missing closing `)`"))?;
            let (nums, bits) = body.split_once(';').ok_or_else(|| err("expected `;` in up(N,k;bits)"))?;
            let (n, k) = nums.split_once(',').ok_or_else(|| err("expected `N,k` before `;`"))?;
            let threshold: usize =
                n.trim().parse().map_err(|_| err("threshold must be a natural"))?;
            let period: usize = k.trim().parse().map_err(|_| err("period must be a natural"))?;
            let bits: Vec<bool> = bits
                .trim()
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(err("bits must be 0s and 1s")),
                })
                .collect::<Result<_>>()?;
            return Ok(Self::new(threshold, period, bits)?.canonicalize());
        }
        Err(err("expected `{..}`, `>=n`, `<=n`, `==n`, `even`, `odd` or `up(N,k;bits)`"))
    }
}

impl fmt::Display for UpSet {
    /// Renders the canonical form, preferring the friendly shapes accepted
    /// by [`UpSet::parse`] so that display and parse round-trip.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.canonicalize();
        if c.period == 1 {
            if !c.bits[c.threshold] {
                // Finite set.
                let elems: Vec<String> = (0..c.threshold)
                    .filter(|&i| c.bits[i])
                    .map(|i| i.to_string())
                    .collect();
                return write!(f, "{{{}}}", elems.join(","));
            }
            if c.bits[..c.threshold].iter().all(|&b| !b) {
                return write!(f, ">={}", c.threshold);
            }
            if c.bits[..c.threshold].iter().all(|&b| b) {
                // {0..t-1} ∪ {t,...} = all naturals = ">=0"; handled above
                // (threshold 0). Mixed prefixes fall through to raw form.
            }
        }
        if c.threshold == 0 && c.period == 2 {
            return write!(f, "{}", if c.bits[0] { "even" } else { "odd" });
        }
        let bits: String = c.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "up({},{};{})", c.threshold, c.period, bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_finite_set() {
        let s = UpSet::parse("{2}").unwrap();
        assert_eq!(s.threshold(), 3);
        assert_eq!(s.period(), 1);
        assert!(!s.contains(0) && !s.contains(1) && s.contains(2));
        assert!(!s.contains(3) && !s.contains(100));

        let s = UpSet::parse("{0,2}").unwrap();
        assert!(s.contains(0) && !s.contains(1) && s.contains(2) && !s.contains(3));

        let empty = UpSet::parse("{}").unwrap();
        assert_eq!(empty.carrier_size(), 1);
        assert!(!empty.contains(0) && !empty.contains(7));
    }

    #[test]
    fn parse_threshold_forms() {
        let s = UpSet::parse(">=1").unwrap();
        assert!(!s.contains(0) && s.contains(1) && s.contains(9));
        assert_eq!((s.threshold(), s.period()), (1, 1));

        let s = UpSet::parse("<=2").unwrap();
        assert!(s.contains(0) && s.contains(2) && !s.contains(3));

        let s = UpSet::parse("==3").unwrap();
        assert!(!s.contains(2) && s.contains(3) && !s.contains(4));

        let even = UpSet::parse("even").unwrap();
        assert!(even.contains(0) && !even.contains(1) && even.contains(8));
        let odd = UpSet::parse("odd").unwrap();
        assert!(!odd.contains(0) && odd.contains(1) && odd.contains(7));
    }

    #[test]
    fn parse_raw_form_and_errors() {
        let s = UpSet::parse("up(2,3;01011)").unwrap();
        assert!(!s.contains(0) && s.contains(1) && !s.contains(2));
        assert!(s.contains(3) && s.contains(4) && !s.contains(5) && s.contains(6));

        assert!(UpSet::parse("up(1,0;1)").is_err(), "zero period");
        assert!(UpSet::parse("up(1,2;1)").is_err(), "wrong bit count");
        assert!(UpSet::parse("up(1,2;1x0)").is_err(), "bad bit char");
        assert!(UpSet::parse("{1,}").is_err());
        assert!(UpSet::parse(">=x").is_err());
        assert!(UpSet::parse("primes").is_err());
    }

    #[test]
    fn hom_folds_into_the_periodic_tail() {
        // N=2, k=3: carrier {0,1,2,3,4}; hom(7) = 2 + (7-2) % 3 = 4.
        let s = UpSet::new(2, 3, vec![false, true, false, true, true]).unwrap();
        assert_eq!(s.hom(0), 0);
        assert_eq!(s.hom(4), 4);
        assert_eq!(s.hom(5), 2);
        assert_eq!(s.hom(7), 4);
    }

    #[test]
    fn madd_mirrors_addition_of_representatives() {
        let s = UpSet::new(2, 3, vec![false, true, false, true, true]).unwrap();
        // 3 + 4 = 7 ↦ 4.
        assert_eq!(s.madd(3, 4), 4);
        for a in 0..40usize {
            for b in 0..40usize {
                assert_eq!(s.madd(s.hom(a), s.hom(b)), s.hom(a + b), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn accepts_agrees_with_contains() {
        let s = UpSet::parse("{1,4}").unwrap();
        for n in 0..30 {
            assert_eq!(s.accepts(s.hom(n)), s.contains(n), "n={n}");
        }
    }

    #[test]
    fn canonicalize_finds_minimal_form() {
        // "even" written with threshold 1, period 4.
        let s = UpSet::new(1, 4, vec![true, false, true, false, true]).unwrap();
        let c = s.canonicalize();
        assert_eq!((c.threshold(), c.period()), (0, 2));
        assert_eq!(c, UpSet::parse("even").unwrap());

        // Already-canonical forms are fixed points.
        for text in ["{2}", ">=1", "even", "{}", "{0,2}", "up(2,3;01011)"] {
            let s = UpSet::parse(text).unwrap();
            assert_eq!(s.canonicalize(), s, "{text}");
        }
    }

    #[test]
    fn display_round_trips() {
        for text in ["{2}", "{0,2}", "{}", ">=1", ">=0", "even", "odd", "up(2,3;01011)", "<=2"] {
            let s = UpSet::parse(text).unwrap();
            let shown = s.to_string();
            let back = UpSet::parse(&shown).unwrap();
            assert_eq!(back, s, "{text} -> {shown}");
        }
    }
}

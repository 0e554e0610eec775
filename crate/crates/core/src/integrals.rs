//! Molecular integral ingestion and the rearranged (one-body, two-body)
//! coefficient form `Σ T a†a + Σ V a†a a†a`.
//!
//! All tensors are over spatial orbitals; spin enters only through the
//! factors in the LCU norms.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;
const DUPLICATE_TOL: f64 = 1e-12;

/// Index of `(p, q, r, s)` in a flat `n^4` tensor.
#[inline]
pub fn idx4(n: usize, p: usize, q: usize, r: usize, s: usize) -> usize {
    ((p * n + q) * n + r) * n + s
}

/// The eight index permutations under which real orbital integrals are invariant.
pub fn symmetry_images(p: usize, q: usize, r: usize, s: usize) -> [(usize, usize, usize, usize); 8] {
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

/// Raw integrals `h_pq` and chemist-notation `(pq|rs)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RawIntegrals {
    pub n_spatial: usize,
    /// Row-major `n × n`.
    pub h1: Vec<f64>,
    /// Flat `n^4`, see [`idx4`].
    pub h2: Vec<f64>,
    pub core_energy: f64,
}

/// Coefficients of `Σ_pq T_pq a†_p a_q + Σ_pqrs V_pqrs a†_p a_q a†_r a_s`
/// (spin summed), plus a constant.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralSet {
    pub n_spatial: usize,
    pub t: Vec<f64>,
    pub v: Vec<f64>,
    pub core_energy: f64,
}

fn check_symmetry(n: usize, one: &[f64], two: &[f64], what: &str) -> Result<()> {
    if one.len() != n * n || two.len() != n * n * n * n {
        return Err(Error::Invalid(format!("{what}: tensor sizes do not match n = {n}")));
    }
    if let Some(x) = one.iter().chain(two).find(|x| !x.is_finite()) {
        return Err(Error::Invalid(format!("{what}: non-finite coefficient {x}")));
    }
    for p in 0..n {
        for q in 0..n {
            if (one[p * n + q] - one[q * n + p]).abs() > SYMMETRY_TOL {
                return Err(Error::Invalid(format!("{what}: one-body term not symmetric at ({p},{q})")));
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let x = two[idx4(n, p, q, r, s)];
                    for (a, b2, c, d) in symmetry_images(p, q, r, s) {
                        if (two[idx4(n, a, b2, c, d)] - x).abs() > SYMMETRY_TOL {
                            return Err(Error::Invalid(format!(
                                "{what}: two-body term breaks index symmetry at ({p},{q},{r},{s})"
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

impl RawIntegrals {
    pub fn validate(&self) -> Result<()> {
        check_symmetry(self.n_spatial, &self.h1, &self.h2, "raw integrals")
    }
}

impl IntegralSet {
    pub fn new(n_spatial: usize, t: Vec<f64>, v: Vec<f64>, core_energy: f64) -> Result<IntegralSet> {
        check_symmetry(n_spatial, &t, &v, "integral set")?;
        Ok(IntegralSet { n_spatial, t, v, core_energy })
    }

    pub fn validate(&self) -> Result<()> {
        check_symmetry(self.n_spatial, &self.t, &self.v, "integral set")
    }

    /// Number of spin orbitals, `N = 2 n_spatial`.
    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn t(&self, p: usize, q: usize) -> f64 {
        self.t[p * self.n_spatial + q]
    }

    pub fn v(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.v[idx4(self.n_spatial, p, q, r, s)]
    }
}

fn parse_value(tok: &str) -> Option<f64> {
    tok.replace(['D', 'd'], "E").parse().ok()
}

/// Reads an FCIDUMP document.
///
/// Lines with only `i` nonzero (orbital energies) are skipped. Repeated
/// entries for the same symmetry class must agree within 1e-12.
pub fn load_fcidump(reader: impl BufRead) -> Result<RawIntegrals> {
    let mut lines = reader.lines().enumerate();
    let mut header = String::new();
    let mut header_done = false;
    for (i, line) in lines.by_ref() {
        let line = line?;
        let lineno = i + 1;
        if header.is_empty() && !line.trim_start().to_ascii_uppercase().starts_with("&FCI") {
            return Err(Error::Parse { line: lineno, msg: "expected `&FCI` header".into() });
        }
        header.push_str(&line);
        header.push(' ');
        let up = line.to_ascii_uppercase();
        if up.contains("&END") || up.trim_end().ends_with('/') || up.trim() == "/" {
            header_done = true;
            break;
        }
    }
    if !header_done {
        return Err(Error::Parse { line: 0, msg: "header is not terminated by `/` or `&END`".into() });
    }
    let n = parse_norb(&header).ok_or(Error::Parse { line: 1, msg: "header does not define NORB".into() })?;
    let mut raw = RawIntegrals { n_spatial: n, h1: vec![0.0; n * n], h2: vec![0.0; n.pow(4)], core_energy: 0.0 };
    let mut seen: HashMap<[usize; 4], (f64, usize)> = HashMap::new();
    for (i, line) in lines {
        let line = line?;
        let lineno = i + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(Error::Parse { line: lineno, msg: format!("expected `value i j k l`, found {} fields", toks.len()) });
        }
        let value = parse_value(toks[0])
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Parse { line: lineno, msg: format!("non-numeric value `{}`", toks[0]) })?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            let v: usize = tok
                .parse()
                .map_err(|_| Error::Parse { line: lineno, msg: format!("bad orbital index `{tok}`") })?;
            if v > n {
                return Err(Error::Parse { line: lineno, msg: format!("orbital index {v} out of range 0..={n}") });
            }
            *slot = v;
        }
        let key = canonical_key(idx);
        if let Some(&(prev, prev_line)) = seen.get(&key) {
            if (prev - value).abs() > DUPLICATE_TOL {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("value {value} conflicts with {prev} given on line {prev_line}"),
                });
            }
        }
        seen.insert(key, (value, lineno));
        match idx {
            [0, 0, 0, 0] => raw.core_energy = value,
            [i, j, 0, 0] if i > 0 && j > 0 => {
                raw.h1[(i - 1) * n + (j - 1)] = value;
                raw.h1[(j - 1) * n + (i - 1)] = value;
            }
            [i, 0, 0, 0] if i > 0 => {}
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                for (a, b, c, d) in symmetry_images(i - 1, j - 1, k - 1, l - 1) {
                    raw.h2[idx4(n, a, b, c, d)] = value;
                }
            }
            _ => return Err(Error::Parse { line: lineno, msg: format!("unsupported index pattern {idx:?}") }),
        }
    }
    Ok(raw)
}

fn parse_norb(header: &str) -> Option<usize> {
    let up = header.to_ascii_uppercase();
    let pos = up.find("NORB")?;
    let rest = up[pos + 4..].trim_start().strip_prefix('=')?.trim_start();
    let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
    digits.parse().ok()
}

/// Canonical representative of an FCIDUMP index tuple under the integral symmetries.
fn canonical_key([i, j, k, l]: [usize; 4]) -> [usize; 4] {
    if k == 0 && l == 0 {
        return [i.max(j), i.min(j), 0, 0];
    }
    let (a, b) = (i.max(j), i.min(j));
    let (c, d) = (k.max(l), k.min(l));
    if (a, b) >= (c, d) {
        [a, b, c, d]
    } else {
        [c, d, a, b]
    }
}

/// `%.16e` formatting: 17 significant digits and a signed two-digit exponent.
pub fn sci(x: f64) -> String {
    let s = format!("{x:.16e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    format!("{mant}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

/// Writes canonical representatives `p≥q, r≥s, pq≥rs` with 17 significant digits.
pub fn write_fcidump(raw: &RawIntegrals, mut w: impl Write) -> Result<()> {
    let n = raw.n_spatial;
    writeln!(w, " &FCI NORB={n},NELEC=0,MS2=0,")?;
    writeln!(w, " &END")?;
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    if (p, q) < (r, s) {
                        continue;
                    }
                    let x = raw.h2[idx4(n, p, q, r, s)];
                    if x != 0.0 {
                        writeln!(w, "{} {} {} {} {}", sci(x), p + 1, q + 1, r + 1, s + 1)?;
                    }
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..=p {
            let x = raw.h1[p * n + q];
            if x != 0.0 {
                writeln!(w, "{} {} {} 0 0", sci(x), p + 1, q + 1)?;
            }
        }
    }
    writeln!(w, "{} 0 0 0 0", sci(raw.core_energy))?;
    Ok(())
}

/// Rearranges `Σ h a†a + ½ Σ (pq|rs) a†_p a†_r a_s a_q` into
/// `Σ T a†a + Σ V a†a a†a` with `V = h2/2` and `T_pq = h_pq − ½ Σ_r (pr|rq)`.
pub fn to_chemist_form(raw: &RawIntegrals) -> Result<IntegralSet> {
    raw.validate()?;
    let n = raw.n_spatial;
    let v: Vec<f64> = raw.h2.iter().map(|x| 0.5 * x).collect();
    let mut t = raw.h1.clone();
    for p in 0..n {
        for q in 0..n {
            let shift: f64 = (0..n).map(|r| raw.h2[idx4(n, p, r, r, q)]).sum();
            t[p * n + q] -= 0.5 * shift;
        }
    }
    // Exact symmetrization guards against summation-order rounding.
    for p in 0..n {
        for q in 0..p {
            let m = 0.5 * (t[p * n + q] + t[q * n + p]);
            t[p * n + q] = m;
            t[q * n + p] = m;
        }
    }
    IntegralSet::new(n, t, v, raw.core_energy)
}

/// `W[(p,q),(r,s)] = V_pqrs` with composite index `p·n + q`.
pub fn matricize(iset: &IntegralSet) -> DMatrix<f64> {
    let n = iset.n_spatial;
    DMatrix::from_fn(n * n, n * n, |row, col| iset.v(row / n, row % n, col / n, col % n))
}

/// Inverse of [`matricize`].
pub fn unmatricize(w: &DMatrix<f64>, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n.pow(4)];
    for row in 0..n * n {
        for col in 0..n * n {
            v[idx4(n, row / n, row % n, col / n, col % n)] = w[(row, col)];
        }
    }
    v
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for p in 0..n {
        for q in 0..=p {
            let x = rng.gen_range(-1.0..1.0);
            m[p * n + q] = x;
            m[q * n + p] = x;
        }
    }
    m
}

/// Random instance with `V = Σ_ℓ c_ℓ g^(ℓ) ⊗ g^(ℓ)` for `rank` random
/// symmetric `g` and positive `c`, so `W` is positive semidefinite with
/// rank at most `rank`. Deterministic in `seed`.
pub fn random_integrals(seed: u64, n_spatial: usize, rank: usize) -> Result<IntegralSet> {
    let n = n_spatial;
    if rank > n * n {
        return Err(Error::Invalid(format!("rank {rank} exceeds n_spatial^2 = {}", n * n)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_symmetric(&mut rng, n);
    let mut v = vec![0.0; n.pow(4)];
    for _ in 0..rank {
        let c: f64 = rng.gen_range(0.1..1.0);
        let g = random_symmetric(&mut rng, n);
        for pq in 0..n * n {
            for rs in 0..n * n {
                v[pq * n * n + rs] += c * g[pq] * g[rs];
            }
        }
    }
    let core_energy = rng.gen_range(-1.0..1.0);
    IntegralSet::new(n, t, v, core_energy)
}

/// Random raw integrals with the full index symmetry (no definiteness).
pub fn random_raw_integrals(seed: u64, n_spatial: usize) -> RawIntegrals {
    let n = n_spatial;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h1 = random_symmetric(&mut rng, n);
    let mut h2 = vec![0.0; n.pow(4)];
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let key = canonical_key([p + 1, q + 1, r + 1, s + 1]);
                    if key == [p + 1, q + 1, r + 1, s + 1] {
                        let x = rng.gen_range(-1.0..1.0);
                        for (a, b, c, d) in symmetry_images(p, q, r, s) {
                            h2[idx4(n, a, b, c, d)] = x;
                        }
                    }
                }
            }
        }
    }
    RawIntegrals { n_spatial: n, h1, h2, core_energy: rng.gen_range(-1.0..1.0) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_one_body_line() {
        let text = "&FCI NORB=2,\n&END\n1.5 1 1 0 0\n";
        let raw = load_fcidump(text.as_bytes()).unwrap();
        assert_eq!(raw.h1, vec![1.5, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn two_body_line_fills_all_images() {
        let text = "&FCI NORB=2 /\n0.7 1 2 1 2\n";
        let raw = load_fcidump(text.as_bytes()).unwrap();
        for (a, b, c, d) in symmetry_images(0, 1, 0, 1) {
            assert_eq!(raw.h2[idx4(2, a, b, c, d)], 0.7);
        }
        assert_eq!(raw.h2.iter().filter(|&&x| x != 0.0).count(), 4);
    }

    #[test]
    fn conflicting_duplicate_reports_line() {
        let text = "&FCI NORB=2\n/\n0.7 1 2 1 2\n0.8 2 1 1 2\n";
        match load_fcidump(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_out_of_range_and_bad_values() {
        assert!(matches!(load_fcidump("&FCI NORB=2 /\n1.0 3 1 0 0\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(load_fcidump("&FCI NORB=2 /\nabc 1 1 0 0\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
        assert!(load_fcidump("NORB=2\n".as_bytes()).is_err());
        assert!(load_fcidump("&FCI NORB=2\n1.0 1 1 0 0\n".as_bytes()).is_err());
    }

    #[test]
    fn fortran_exponent_accepted() {
        let raw = load_fcidump("&FCI NORB=1 &END\n2.5D-1 1 1 1 1\n".as_bytes()).unwrap();
        assert_eq!(raw.h2[0], 0.25);
    }

    #[test]
    fn zero_two_body_keeps_one_body() {
        let mut raw = random_raw_integrals(3, 3);
        raw.h2.iter_mut().for_each(|x| *x = 0.0);
        let iset = to_chemist_form(&raw).unwrap();
        assert_eq!(iset.t, raw.h1);
        assert!(iset.v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn scientific_format() {
        assert_eq!(sci(1.5), "1.5000000000000000e+00");
        assert_eq!(sci(-0.25e-11), "-2.4999999999999998e-12");
        assert_eq!(sci(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn matricize_layout() {
        let iset = random_integrals(1, 1, 1).unwrap();
        let w = matricize(&iset);
        assert_eq!(w.shape(), (1, 1));
        assert_eq!(w[(0, 0)], iset.v(0, 0, 0, 0));
        let iset = random_integrals(2, 2, 2).unwrap();
        let w = matricize(&iset);
        assert_eq!(w[(2, 3)], iset.v(1, 0, 1, 1));
        assert_eq!(unmatricize(&w, 2), iset.v);
    }
}

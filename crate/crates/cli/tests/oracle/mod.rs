#![allow(clippy::needless_range_loop)]
//! Naive dense reference computations, written without any of the library's
//! linear algebra or symbol code. Small and slow on purpose.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Row-major dense integer matrix.
pub type Dense = Vec<Vec<BigInt>>;

pub fn zeros(rows: usize, cols: usize) -> Dense {
    vec![vec![BigInt::zero(); cols]; rows]
}

fn cols_of(m: &Dense) -> usize {
    m.first().map_or(0, Vec::len)
}

/// Invariant factors (nonzero diagonal of the Smith form) by plain row and column elimination.
pub fn smith_diagonal(m: &Dense) -> Vec<BigInt> {
    let mut a = m.clone();
    let rows = a.len();
    let cols = cols_of(&a);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the remaining block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                let q = a[i][t].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for j in t..cols {
                        let v = &q * &a[t][j];
                        a[i][j] -= v;
                    }
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for i in t..rows {
                        let v = &q * &a[i][t];
                        a[i][j] -= v;
                    }
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // pivot must divide the rest of the block
                let bad = (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..cols {
                            let v = a[i][j].clone();
                            a[t][j] += v;
                        }
                        continue;
                    }
                }
            }
            // move the smallest entry of row/column t to the pivot
            let mut best = (t, t);
            for i in t..rows {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Column echelon form `E = A T` with `T` unimodular. Returns `(E, T, pivot rows)`:
/// the first `pivots.len()` columns of `E` are nonzero with strictly increasing pivot rows,
/// the rest are zero.
pub fn column_echelon(a: &Dense, cols: usize) -> (Dense, Dense, Vec<usize>) {
    let rows = a.len();
    let mut e = a.clone();
    let mut t = zeros(cols, cols);
    for (i, row) in t.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    let col_op = |m: &mut Dense, dst: usize, src: usize, q: &BigInt| {
        for row in m.iter_mut() {
            let v = q * &row[src];
            row[dst] -= v;
        }
    };
    let swap = |m: &mut Dense, x: usize, y: usize| {
        for row in m.iter_mut() {
            row.swap(x, y);
        }
    };
    let mut pivots = Vec::new();
    let mut c = 0;
    for r in 0..rows {
        if c == cols {
            break;
        }
        loop {
            let nz: Vec<usize> = (c..cols).filter(|&j| !e[r][j].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let m = *nz.iter().min_by_key(|&&j| e[r][j].abs()).unwrap();
            swap(&mut e, c, m);
            swap(&mut t, c, m);
            if nz.len() == 1 {
                break;
            }
            for j in c + 1..cols {
                if !e[r][j].is_zero() {
                    let q = e[r][j].div_floor(&e[r][c]);
                    col_op(&mut e, j, c, &q);
                    col_op(&mut t, j, c, &q);
                }
            }
        }
        if (c..cols).any(|j| !e[r][j].is_zero()) {
            pivots.push(r);
            c += 1;
        }
    }
    (e, t, pivots)
}

/// Basis of `{x in Z^cols : A x = 0}` as columns.
pub fn kernel(a: &Dense, cols: usize) -> Vec<Vec<BigInt>> {
    let (_, t, pivots) = column_echelon(a, cols);
    (pivots.len()..cols).map(|j| t.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Columns as a dense matrix with `rows` rows.
pub fn from_columns(rows: usize, cols: &[Vec<BigInt>]) -> Dense {
    let mut m = zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for i in 0..rows {
            m[i][j] = c[i].clone();
        }
    }
    m
}

/// A lattice in echelon form, for exact membership and coordinates.
pub struct Lattice {
    basis: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl Lattice {
    pub fn span(dim: usize, gens: &[Vec<BigInt>]) -> Lattice {
        let (e, _, pivots) = column_echelon(&from_columns(dim, gens), gens.len());
        let basis = (0..pivots.len()).map(|j| e.iter().map(|row| row[j].clone()).collect()).collect();
        Lattice { basis, pivots }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `v` in the echelon basis, if `v` is in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut rest = v.to_vec();
        let mut out = Vec::new();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let (q, r) = rest[p].div_rem(&b[p]);
            if !r.is_zero() {
                return None;
            }
            for (x, y) in rest.iter_mut().zip(b) {
                *x -= &q * y;
            }
            out.push(q);
        }
        rest.iter().all(Zero::is_zero).then_some(out)
    }
}

/// Invariants of `outer / inner` for lattices `inner ⊆ outer`: torsion factors and free rank.
pub fn quotient_invariants(dim: usize, outer: &[Vec<BigInt>], inner: &[Vec<BigInt>]) -> (Vec<BigInt>, usize) {
    let l = Lattice::span(dim, outer);
    let coords: Vec<Vec<BigInt>> = inner.iter().map(|v| l.coordinates(v).expect("inner lies in outer")).collect();
    let d = smith_diagonal(&from_columns(l.rank(), &coords));
    let torsion = d.iter().filter(|x| !x.is_one()).cloned().collect();
    (torsion, l.rank() - d.len())
}

/// `Z/2 + Z^3`-style description matching the library's text output.
pub fn describe(torsion: &[BigInt], free: usize) -> String {
    let mut parts: Vec<String> = torsion.iter().map(|d| format!("Z/{d}")).collect();
    match free {
        0 => {}
        1 => parts.push("Z".into()),
        r => parts.push(format!("Z^{r}")),
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

// ---- arithmetic of Q at a finite set of primes ----

fn pow_mod(mut b: i64, mut e: u64, m: i64) -> i64 {
    let mut r = 1i64;
    b = b.rem_euclid(m);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Smallest primitive root mod an odd prime, by brute force.
pub fn primitive_root(p: i64) -> i64 {
    (2..p).find(|&g| (1..p - 1).all(|k| pow_mod(g, k as u64, p) != 1)).unwrap_or(1)
}

/// Discrete log of `x` mod `p` to base `g`, by brute force.
pub fn dlog(x: i64, g: i64, p: i64) -> i64 {
    let x = x.rem_euclid(p);
    let mut y = 1;
    for k in 0..p - 1 {
        if y == x {
            return k;
        }
        y = y * g % p;
    }
    panic!("{x} is not a unit mod {p}")
}

/// Basis unit of `Q`: `-1` or a prime.
fn valuation(u: i64, p: i64) -> i64 {
    if u == p { 1 } else { 0 }
}

/// Tame symbol of two basis units at odd `p`, as a log mod `p - 1`.
pub fn tame_log(a: i64, b: i64, p: i64) -> i64 {
    let (va, vb) = (valuation(a, p), valuation(b, p));
    // (-1)^{va vb} a^{vb} / b^{va} with the p-parts removed
    let sign = if va * vb % 2 == 1 { -1 } else { 1 };
    let unit = |x: i64, v: i64| if v > 0 { 1 } else { x };
    let num = sign * pow_mod(unit(a, va), vb as u64, p);
    let den = pow_mod(unit(b, vb), va as u64, p);
    let g = primitive_root(p);
    (dlog(num, g, p) - dlog(den, g, p)).rem_euclid(p - 1)
}

/// Dyadic Hilbert symbol of two basis units, as a bit.
pub fn hilbert2_bit(a: i64, b: i64) -> i64 {
    let split = |x: i64| if x == 2 { (1, 1) } else { (0, x.rem_euclid(8)) };
    let (al, u) = split(a);
    let (be, v) = split(b);
    let eps = |x: i64| ((x - 1) / 2) % 2;
    let om = |x: i64| ((x * x - 1) / 8) % 2;
    (eps(u) * eps(v) + al * om(v) + be * om(u)) % 2
}

/// The truncated complex at positions 3 -> 2 -> 1 for `n = 3` over `Q`, with support
/// `{-1} ∪ primes`, in the naive tuple presentation.
pub struct NaiveB3 {
    pub basis: Vec<i64>,
    /// Position 2 is `U ⊗ U ⊗ U`; kernel of the map to position 1 (lattice basis, columns).
    pub cycles: Vec<Vec<BigInt>>,
    /// Image of position 3 plus the relations of position 2.
    pub boundaries: Vec<Vec<BigInt>>,
}

fn order(u: i64) -> u64 {
    if u == -1 { 2 } else { 0 }
}

fn gcd0(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

impl NaiveB3 {
    pub fn new(primes: &[i64]) -> NaiveB3 {
        let mut basis = vec![-1];
        basis.extend_from_slice(primes);
        let b = basis.len();
        let idx3 = |i: usize, j: usize, k: usize| (i * b + j) * b + k;
        let dim2 = b * b * b;

        // K_2: symbol (x, y) -> (dyadic bit, tame logs at odd primes) in Z/2 + sum Z/(p-1)
        let odd: Vec<i64> = primes.iter().copied().filter(|&p| p != 2).collect();
        let moduli: Vec<i64> = std::iter::once(2).chain(odd.iter().map(|p| p - 1)).collect();
        let sym = |x: usize, y: usize| -> Vec<i64> {
            let mut v = vec![hilbert2_bit(basis[x], basis[y])];
            v.extend(odd.iter().map(|&p| tame_log(basis[x], basis[y], p)));
            v
        };
        // presentation of K_2 on the b^2 symbol generators: kernel of [M | diag(moduli)]
        let r = moduli.len();
        let ns = b * b;
        let mut m = zeros(r, ns + r);
        for x in 0..b {
            for y in 0..b {
                for (i, c) in sym(x, y).into_iter().enumerate() {
                    m[i][x * b + y] = BigInt::from(c);
                }
            }
        }
        for (i, d) in moduli.iter().enumerate() {
            m[i][ns + i] = BigInt::from(*d);
        }
        let k2_rel: Vec<Vec<BigInt>> = kernel(&m, ns + r).into_iter().map(|v| v[..ns].to_vec()).collect();

        // position 1 = U ⊗ K_2: generators (u, symbol); relations from both factors
        let dim1 = b * ns;
        let mut rel1: Vec<Vec<BigInt>> = Vec::new();
        for u in 0..b {
            for rel in &k2_rel {
                let mut v = vec![BigInt::zero(); dim1];
                for s in 0..ns {
                    v[u * ns + s] = rel[s].clone();
                }
                rel1.push(v);
            }
            if order(basis[u]) == 2 {
                for s in 0..ns {
                    let mut v = vec![BigInt::zero(); dim1];
                    v[u * ns + s] = BigInt::from(2);
                    rel1.push(v);
                }
            }
        }

        // δ_2: (a, b, c) -> b ⊗ {a, c} + a ⊗ {b, c}
        let mut d2 = zeros(dim1, dim2);
        for i in 0..b {
            for j in 0..b {
                for k in 0..b {
                    let col = idx3(i, j, k);
                    d2[j * ns + i * b + k][col] += 1;
                    d2[i * ns + j * b + k][col] += 1;
                }
            }
        }
        // cycles: x with δ_2 x in the relation lattice of position 1
        let mut aug = zeros(dim1, dim2 + rel1.len());
        for r in 0..dim1 {
            for c in 0..dim2 {
                aug[r][c] = d2[r][c].clone();
            }
            for (c, rel) in rel1.iter().enumerate() {
                aug[r][dim2 + c] = rel[r].clone();
            }
        }
        let cycles: Vec<Vec<BigInt>> =
            kernel(&aug, dim2 + rel1.len()).into_iter().map(|v| v[..dim2].to_vec()).collect();

        // position 2 relations: order of (i, j, k) is gcd of the unit orders
        let mut boundaries = Vec::new();
        for i in 0..b {
            for j in 0..b {
                for k in 0..b {
                    let o = gcd0(gcd0(order(basis[i]), order(basis[j])), order(basis[k]));
                    if o != 0 {
                        let mut v = vec![BigInt::zero(); dim2];
                        v[idx3(i, j, k)] = BigInt::from(o);
                        boundaries.push(v);
                    }
                }
            }
        }
        // δ_3: (a, b, c) ⊗ 1 -> (b, c) ⊗ {a} + (a, c) ⊗ {b} + (a, b) ⊗ {c}
        for i in 0..b {
            for j in 0..b {
                for k in 0..b {
                    let mut v = vec![BigInt::zero(); dim2];
                    v[idx3(j, k, i)] += 1;
                    v[idx3(i, k, j)] += 1;
                    v[idx3(i, j, k)] += 1;
                    boundaries.push(v);
                }
            }
        }
        NaiveB3 { basis, cycles, boundaries }
    }

    pub fn dim(&self) -> usize {
        self.basis.len().pow(3)
    }

    pub fn homology(&self) -> (Vec<BigInt>, usize) {
        quotient_invariants(self.dim(), &self.cycles, &self.boundaries)
    }

    /// Image of `H(self) -> H(bigger)` induced by including the smaller unit basis.
    pub fn image_in(&self, bigger: &NaiveB3) -> (Vec<BigInt>, usize) {
        let b = self.basis.len();
        let pos: Vec<usize> = self.basis.iter().map(|u| bigger.basis.iter().position(|v| v == u).unwrap()).collect();
        let bb = bigger.basis.len();
        let push = |v: &Vec<BigInt>| -> Vec<BigInt> {
            let mut w = vec![BigInt::zero(); bigger.dim()];
            for i in 0..b {
                for j in 0..b {
                    for k in 0..b {
                        let x = &v[(i * b + j) * b + k];
                        if !x.is_zero() {
                            w[(pos[i] * bb + pos[j]) * bb + pos[k]] += x;
                        }
                    }
                }
            }
            w
        };
        let mut outer: Vec<Vec<BigInt>> = self.cycles.iter().map(push).collect();
        outer.extend(bigger.boundaries.iter().cloned());
        quotient_invariants(bigger.dim(), &outer, &bigger.boundaries)
    }
}

//! Reference computations written independently of the library code.
#![allow(dead_code)]

use rand::Rng;

/// Hidden-value labels `γ0 γ1` in index order.
pub const LABELS: [&str; 4] = ["00", "10", "01", "11"];

fn bit(label: &str, b: usize) -> usize {
    (label.as_bytes()[b] - b'0') as usize
}

pub fn idx(a: usize, b: usize, c: usize) -> usize {
    4 * a + 2 * b + c
}

/// `p(a,b,c)` by direct summation over labelled hidden values.
pub fn classical_behavior(pg: &[f64; 4], pa: &[f64; 4], b0: &[f64; 16]) -> [f64; 8] {
    let mut p = [0.0; 8];
    for (gi, gl) in LABELS.iter().enumerate() {
        for (ai, al) in LABELS.iter().enumerate() {
            let w = pg[gi] * pa[ai];
            let pb = [b0[4 * gi + ai], 1.0 - b0[4 * gi + ai]];
            for b in 0..2 {
                p[idx(bit(gl, b), b, bit(al, b))] += w * pb[b];
            }
        }
    }
    p
}

/// `[P(A=a|do b) at 2b+a, then P(C=c|do b) at 4+2b+c]`.
pub fn classical_do(pg: &[f64; 4], pa: &[f64; 4]) -> [f64; 8] {
    let mut d = [0.0; 8];
    for (k, l) in LABELS.iter().enumerate() {
        for b in 0..2 {
            d[2 * b + bit(l, b)] += pg[k];
            d[4 + 2 * b + bit(l, b)] += pa[k];
        }
    }
    d
}

fn sign(x: usize) -> f64 {
    if x % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Unnormalized `<A^i C^j>_b`.
pub fn corr(p: &[f64; 8], i: usize, j: usize, b: usize) -> f64 {
    let mut s = 0.0;
    for a in 0..2 {
        for c in 0..2 {
            s += sign(a * i + c * j) * p[idx(a, b, c)];
        }
    }
    s
}

fn common_penalties(p: &[f64; 8]) -> (f64, f64, f64, f64, f64, f64) {
    let pb0 = (0..2).flat_map(|a| (0..2).map(move |c| (a, c))).map(|(a, c)| p[idx(a, 0, c)]).sum::<f64>();
    let marg = (pb0 - 0.25).abs();
    let anti = (p[idx(0, 1, 1)] + p[idx(1, 1, 0)] - 0.25).abs();
    let diag = (p[idx(0, 1, 0)] - 0.25).abs() + (p[idx(1, 1, 1)] - 0.25).abs();
    let ac1 = (corr(p, 1, 1, 1) - 0.25).abs();
    let one = (corr(p, 1, 0, 1) + corr(p, 0, 1, 1)).abs();
    let zero = corr(p, 1, 0, 0).abs() + corr(p, 0, 1, 0).abs();
    (marg, anti, diag, ac1, one, zero)
}

pub fn witness_i(p: &[f64; 8]) -> f64 {
    let (marg, anti, diag, ac1, one, zero) = common_penalties(p);
    2.0 * (p[idx(0, 0, 0)].sqrt() + p[idx(1, 0, 1)].sqrt()) + 3.0 * p[idx(1, 1, 0)].sqrt()
        - 18.0 * marg
        - 18.0 * anti
        - 4.0 * diag
        - 4.0 * ac1
        - one
        - zero
}

pub fn witness_f(p: &[f64; 8], d: &[f64; 8]) -> f64 {
    let (marg, anti, diag, ac1, one, zero) = common_penalties(p);
    let mut do_terms = 0.0;
    for b in 0..2 {
        do_terms += (d[2 * b] - d[2 * b + 1]).abs() + (d[4 + 2 * b] - d[4 + 2 * b + 1]).abs();
    }
    2.0 * (p[idx(0, 0, 0)].sqrt() + p[idx(1, 0, 1)].sqrt()) + 4.0 * p[idx(1, 1, 0)].sqrt()
        - diag
        - ac1
        - anti
        - one
        - zero
        - 18.0 * marg
        - do_terms
}

/// Behavior of the noisy quantum family, written from the correlators
/// `<AC>_0 = v^2 sin2θ/4`, `<A>_1 = -v cos2θ/4`, `<C>_1 = v cos2θ/4`,
/// `<AC>_1 = v^2/4`, one-body `b = 0` terms zero and `P(b=0) = 1/4`.
pub fn family(theta: f64, v: f64) -> [f64; 8] {
    let e = [
        [0.25, 0.0, 0.0, v * v * (2.0 * theta).sin() / 4.0],
        [0.75, -v * (2.0 * theta).cos() / 4.0, v * (2.0 * theta).cos() / 4.0, v * v / 4.0],
    ];
    let mut p = [0.0; 8];
    for b in 0..2 {
        let [n, ea, ec, eac] = e[b];
        for a in 0..2 {
            for c in 0..2 {
                p[idx(a, b, c)] = (n + sign(a) * ea + sign(c) * ec + sign(a + c) * eac) / 4.0;
            }
        }
    }
    p
}

pub fn random_simplex(rng: &mut impl Rng) -> [f64; 4] {
    let x: [f64; 4] = std::array::from_fn(|_| -rng.random::<f64>().max(1e-300).ln());
    let s: f64 = x.iter().sum();
    x.map(|v| v / s)
}

/// Dense LP `max c·x` s.t. `A x <= b`, `E x = e`, `l <= x <= u`.
pub struct DenseLp {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub e: Vec<Vec<f64>>,
    pub f: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

fn solve_square(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col {
                let k = m[r][col] / m[col][col];
                if k != 0.0 {
                    for cc in col..n {
                        m[r][cc] -= k * m[col][cc];
                    }
                    rhs[r] -= k * rhs[col];
                }
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

/// Maximum over all vertices: every choice of `n` constraints held with
/// equality (equalities always included), solved and filtered for
/// feasibility. `None` when infeasible.
pub fn vertex_enumeration(lp: &DenseLp) -> Option<f64> {
    let n = lp.c.len();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for (r, &rhs) in lp.a.iter().zip(&lp.b) {
        rows.push((r.clone(), rhs));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push((e.clone(), lp.upper[j]));
        rows.push((e, lp.lower[j]));
    }
    let fixed: Vec<(Vec<f64>, f64)> = lp.e.iter().cloned().zip(lp.f.iter().cloned()).collect();
    let k = n - fixed.len();
    let feasible = |x: &[f64]| {
        let dot = |r: &[f64]| r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        lp.a.iter().zip(&lp.b).all(|(r, b)| dot(r) <= b + 1e-9)
            && lp.e.iter().zip(&lp.f).all(|(r, f)| (dot(r) - f).abs() <= 1e-9)
            && x.iter().zip(lp.lower.iter().zip(&lp.upper)).all(|(v, (l, u))| *v >= l - 1e-9 && *v <= u + 1e-9)
    };
    let mut best: Option<f64> = None;
    let mut choose = vec![0usize; k];
    fn next(choose: &mut [usize], total: usize) -> bool {
        let k = choose.len();
        for i in (0..k).rev() {
            if choose[i] < total - k + i {
                choose[i] += 1;
                for j in i + 1..k {
                    choose[j] = choose[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
    for (i, c) in choose.iter_mut().enumerate() {
        *c = i;
    }
    loop {
        let mut m: Vec<Vec<f64>> = fixed.iter().map(|(r, _)| r.clone()).collect();
        let mut rhs: Vec<f64> = fixed.iter().map(|(_, v)| *v).collect();
        for &i in &choose {
            m.push(rows[i].0.clone());
            rhs.push(rows[i].1);
        }
        if let Some(x) = solve_square(m, rhs) {
            if feasible(&x) {
                let v: f64 = lp.c.iter().zip(&x).map(|(a, b)| a * b).sum();
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
        if k == 0 || !next(&mut choose, rows.len()) {
            break;
        }
    }
    best
}

/// Random LP with small integer-ish data; always bounded by the box.
pub fn random_lp(rng: &mut impl Rng) -> DenseLp {
    let n = rng.random_range(1..=6);
    let m = rng.random_range(0..=5);
    let eqs = rng.random_range(0..=n.min(2));
    let num = |rng: &mut dyn rand::RngCore| (rng.random_range(-8i32..=8) as f64) / 2.0;
    let c = (0..n).map(|_| num(rng)).collect();
    let a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| num(rng)).collect()).collect();
    let b = (0..m).map(|_| num(rng) + 2.0).collect();
    let e: Vec<Vec<f64>> = (0..eqs).map(|_| (0..n).map(|_| num(rng)).collect()).collect();
    let f = (0..eqs).map(|_| num(rng)).collect();
    let lower: Vec<f64> = (0..n).map(|_| rng.random_range(-2i32..=0) as f64).collect();
    let upper = lower.iter().map(|l| l + rng.random_range(1i32..=4) as f64).collect();
    DenseLp { c, a, b, e, f, lower, upper }
}

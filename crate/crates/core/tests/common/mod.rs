#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use toric_fibers::fiber::{enumerate_fiber, DEFAULT_CAP};
use toric_fibers::graver::{graver_basis_of_matrix, GraverOptions};
use toric_fibers::lattice::{conformal_leq, Configuration, IntMatrix};
use toric_fibers::markov::{exact_certificate, forcing_certificate, Verdict};
use toric_fibers::transport::{connect, verify_script, TableMultiset};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All nonzero kernel vectors in `[-bound, bound]^n` that are conformally
/// minimal among themselves, one sign each.
pub fn boxed_graver(a: &IntMatrix, bound: i64) -> Vec<Vec<i64>> {
    let n = a.cols();
    let mut kernel = Vec::new();
    let mut x = vec![-bound; n];
    loop {
        if x.iter().any(|&v| v != 0) && a.annihilates(&x) {
            kernel.push(x.clone());
        }
        let mut k = 0;
        while k < n && x[k] == bound {
            x[k] = -bound;
            k += 1;
        }
        if k == n {
            break;
        }
        x[k] += 1;
    }
    let mut out: Vec<Vec<i64>> = kernel
        .iter()
        .filter(|z| !kernel.iter().any(|u| u != *z && conformal_leq(u, z)))
        .filter(|z| z.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0))
        .cloned()
        .collect();
    out.sort();
    out
}

/// Fiber elements by filtering all compositions of `total` into `n` parts.
pub fn naive_fiber(a: &IntMatrix, b: &[i64], total: i64) -> Vec<Vec<i64>> {
    let n = a.cols();
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    fn rec(k: usize, left: i64, x: &mut Vec<i64>, a: &IntMatrix, b: &[i64], out: &mut Vec<Vec<i64>>) {
        let n = x.len();
        if k == n - 1 {
            x[k] = left;
            if a.mul_vec(x).unwrap() == b {
                out.push(x.clone());
            }
            return;
        }
        for v in 0..=left {
            x[k] = v;
            rec(k + 1, left - v, x, a, b, out);
        }
        x[k] = 0;
    }
    rec(0, total, &mut x, a, b, &mut out);
    out.sort();
    out
}

/// Brute-force check for a nonempty proper zero-sum subset of slices.
pub fn has_zero_subsum(slices: &[Vec<i64>]) -> bool {
    let n = slices.len();
    let w = slices[0].len();
    (1u64..(1u64 << n) - 1).any(|mask| {
        (0..w).all(|c| {
            (0..n)
                .filter(|&k| mask >> k & 1 == 1)
                .map(|k| slices[k][c])
                .sum::<i64>()
                == 0
        })
    })
}

pub fn random_margins(rng: &mut ChaCha8Rng, rows: usize, cols: usize, total: i64) -> (Vec<i64>, Vec<i64>) {
    let split = |rng: &mut ChaCha8Rng, parts: usize| {
        let mut v = vec![0i64; parts];
        for _ in 0..total {
            v[rng.gen_range(0..parts)] += 1;
        }
        v
    };
    (split(rng, rows), split(rng, cols))
}

/// A random nonnegative table with the given margins, filled one unit at a
/// time.
pub fn random_table(rng: &mut ChaCha8Rng, r: &[i64], c: &[i64]) -> Vec<i64> {
    let (rows, cols) = (r.len(), c.len());
    let mut rr = r.to_vec();
    let mut cc = c.to_vec();
    let mut g = vec![0i64; rows * cols];
    loop {
        let is: Vec<usize> = (0..rows).filter(|&i| rr[i] > 0).collect();
        let js: Vec<usize> = (0..cols).filter(|&j| cc[j] > 0).collect();
        if is.is_empty() {
            return g;
        }
        let i = *is.choose(rng).unwrap();
        let j = *js.choose(rng).unwrap();
        g[i * cols + j] += 1;
        rr[i] -= 1;
        cc[j] -= 1;
    }
}

/// Applies `steps` random moves of degree two or three that keep every
/// member nonnegative and all edge sums fixed.
pub fn scramble(rng: &mut ChaCha8Rng, m: &mut TableMultiset, steps: usize) {
    let (rows, cols, n) = (m.rows, m.cols, m.len());
    if n < 2 || rows < 2 || cols < 2 {
        return;
    }
    for _ in 0..steps {
        let mut ks: Vec<usize> = (0..n).collect();
        ks.shuffle(rng);
        let mut deltas: Vec<(usize, Vec<i64>)> = Vec::new();
        if n >= 3 && rows >= 3 && cols >= 3 && rng.gen_bool(0.3) {
            let mut is: Vec<usize> = (0..rows).collect();
            let mut js: Vec<usize> = (0..cols).collect();
            is.shuffle(rng);
            js.shuffle(rng);
            let (is, js) = (&is[..3], &js[..3]);
            let even = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];
            let odd = [[0, 2, 1], [2, 1, 0], [1, 0, 2]];
            for t in 0..3 {
                let mut d = vec![0i64; rows * cols];
                for x in 0..3 {
                    d[is[x] * cols + js[even[t][x]]] += 1;
                    d[is[x] * cols + js[odd[t][x]]] -= 1;
                }
                deltas.push((ks[t], d));
            }
        } else {
            let i1 = rng.gen_range(0..rows);
            let i2 = (i1 + rng.gen_range(1..rows)) % rows;
            let j1 = rng.gen_range(0..cols);
            let j2 = (j1 + rng.gen_range(1..cols)) % cols;
            let mut d = vec![0i64; rows * cols];
            d[i1 * cols + j1] += 1;
            d[i2 * cols + j2] += 1;
            d[i1 * cols + j2] -= 1;
            d[i2 * cols + j1] -= 1;
            let neg: Vec<i64> = d.iter().map(|x| -x).collect();
            deltas.push((ks[0], d));
            deltas.push((ks[1], neg));
        }
        let ok = deltas
            .iter()
            .all(|(k, d)| m.members[*k].iter().zip(d).all(|(x, y)| x + y >= 0));
        if ok {
            for (k, d) in deltas {
                for (x, y) in m.members[k].iter_mut().zip(&d) {
                    *x += y;
                }
            }
        }
    }
}

/// A random proper multiset and a scrambled copy in the same fiber.
pub fn random_fiber_pair(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    members: usize,
    total: i64,
) -> (TableMultiset, TableMultiset) {
    let (r, c) = random_margins(rng, rows, cols, total);
    let tables = (0..members).map(|_| random_table(rng, &r, &c)).collect();
    let p = TableMultiset::new(rows, cols, r, c, tables).unwrap();
    let mut q = p.clone();
    scramble(rng, &mut q, 40);
    q.members.shuffle(rng);
    (p, q)
}

/// A graded two-row matrix: all ones over `second`.
pub fn graded_matrix(second: Vec<i64>) -> IntMatrix {
    let n = second.len();
    let mut data = vec![1i64; n];
    data.extend(second);
    IntMatrix::new(2, n, data).unwrap()
}

/// Graver bases of random graded matrices with up to six columns against the
/// boxed search. Returns the number of matrices checked.
pub fn check_graver_against_box(seed: u64, cases: usize) -> Result<usize, String> {
    let mut rng = rng(seed);
    for case in 0..cases {
        let n = rng.gen_range(3..=6);
        let a = graded_matrix((0..n).map(|_| rng.gen_range(0..4)).collect());
        let g = graver_basis_of_matrix(&a, GraverOptions::default()).map_err(|e| e.to_string())?;
        let mut computed: Vec<Vec<i64>> = g.iter().map(|m| m.as_slice().to_vec()).collect();
        computed.sort();
        let brute = boxed_graver(&a, 4);
        if let Some(z) = brute.iter().find(|z| !computed.contains(z)) {
            return Err(format!("case {}: boxed primitive {:?} missing", case, z));
        }
        let fits = computed.iter().all(|z| z.iter().all(|x| x.abs() <= 4));
        if fits && computed != brute {
            return Err(format!("case {}: {} computed, {} boxed", case, computed.len(), brute.len()));
        }
    }
    Ok(cases)
}

/// Fibers of random graded matrices against the composition filter for
/// degrees up to six.
pub fn check_fibers_against_filter(seed: u64, cases: usize) -> Result<usize, String> {
    let mut rng = rng(seed);
    for case in 0..cases {
        let n = rng.gen_range(2..=5);
        let a = graded_matrix((0..n).map(|_| rng.gen_range(0..4)).collect());
        let cfg = Configuration::validate(a.clone()).map_err(|e| e.to_string())?;
        let total = rng.gen_range(0..=6);
        let mut x = vec![0i64; n];
        for _ in 0..total {
            x[rng.gen_range(0..n)] += 1;
        }
        let b = a.mul_vec(&x).unwrap();
        let mut got = enumerate_fiber(&cfg, &b, DEFAULT_CAP)
            .map_err(|e| e.to_string())?
            .elements;
        got.sort();
        if got != naive_fiber(&a, &b, total) {
            return Err(format!("case {}: fiber of {:?} differs", case, b));
        }
    }
    Ok(cases)
}

/// Zero-sum lists of `n` slices over `3 x 3` tables: `n - 1` basic moves
/// and the slice closing the sum.
pub fn random_zero_sum_slices(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    loop {
        let mut slices: Vec<Vec<i64>> = Vec::new();
        for _ in 0..n - 1 {
            let i1 = rng.gen_range(0..3);
            let i2 = (i1 + rng.gen_range(1..3)) % 3;
            let j1 = rng.gen_range(0..3);
            let j2 = (j1 + rng.gen_range(1..3)) % 3;
            let mut s = vec![0i64; 9];
            s[i1 * 3 + j1] += 1;
            s[i2 * 3 + j2] += 1;
            s[i1 * 3 + j2] -= 1;
            s[i2 * 3 + j1] -= 1;
            slices.push(s);
        }
        let mut last = vec![0i64; 9];
        for s in &slices {
            for (l, x) in last.iter_mut().zip(s) {
                *l -= x;
            }
        }
        if last.iter().any(|&x| x != 0) {
            slices.push(last);
            return slices;
        }
    }
}

/// Exact certificates against subset enumeration, and forcing certificates
/// against exact ones whenever forcing decides. Returns the number of
/// decisive forcing runs.
pub fn check_certificates(seed: u64, cases: usize) -> Result<usize, String> {
    let mut rng = rng(seed);
    let mut decisive = 0;
    let zero_sum = |slices: &[Vec<i64>], w: &[usize]| {
        (0..slices[0].len()).all(|c| w.iter().map(|&k| slices[k][c]).sum::<i64>() == 0)
    };
    for case in 0..cases {
        let n = rng.gen_range(2..=12);
        let slices = random_zero_sum_slices(&mut rng, n);
        let exact = exact_certificate(&slices);
        if (exact.verdict == Verdict::Certified) != !has_zero_subsum(&slices) {
            return Err(format!("case {}: exact verdict {:?} is wrong", case, exact.verdict));
        }
        if let Some(w) = &exact.witness {
            if w.is_empty() || w.len() >= n || !zero_sum(&slices, w) {
                return Err(format!("case {}: bad exact witness", case));
            }
        }
        let forcing = forcing_certificate(&slices);
        if forcing.verdict != Verdict::Inconclusive {
            decisive += 1;
            if forcing.verdict != exact.verdict {
                return Err(format!("case {}: forcing says {:?}", case, forcing.verdict));
            }
        }
        if let Some(w) = &forcing.witness {
            if !zero_sum(&slices, w) {
                return Err(format!("case {}: bad forcing witness", case));
            }
        }
    }
    Ok(decisive)
}

/// Margins with every entry at most `cap` and a common total of at least
/// one.
pub fn random_capped_margins(rng: &mut ChaCha8Rng, rows: usize, cols: usize, cap: i64) -> (Vec<i64>, Vec<i64>) {
    loop {
        let r: Vec<i64> = (0..rows).map(|_| rng.gen_range(0..=cap)).collect();
        let total: i64 = r.iter().sum();
        if total == 0 || total > cap * cols as i64 {
            continue;
        }
        let mut c = vec![0i64; cols];
        let mut left = total;
        while left > 0 {
            let j = rng.gen_range(0..cols);
            if c[j] < cap {
                c[j] += 1;
                left -= 1;
            }
        }
        return (r, c);
    }
}

/// Connects random same-fiber pairs and replays every script. Returns the
/// largest step degree seen.
pub fn check_transport_pairs(seed: u64, cases: usize) -> Result<usize, String> {
    let mut rng = rng(seed);
    let mut worst = 0;
    for case in 0..cases {
        let rows = rng.gen_range(2..=4);
        let cols = rng.gen_range(2..=4);
        let members = rng.gen_range(2..=5);
        let (r, c) = random_capped_margins(&mut rng, rows, cols, 4);
        let tables = (0..members).map(|_| random_table(&mut rng, &r, &c)).collect();
        let p = TableMultiset::new(rows, cols, r, c, tables).unwrap();
        let mut q = p.clone();
        scramble(&mut rng, &mut q, 60);
        q.members.shuffle(&mut rng);
        let script = connect(&p, &q).map_err(|e| format!("case {}: {}", case, e))?;
        verify_script(&p, &q, &script).map_err(|e| format!("case {}: {}", case, e))?;
        if script.max_degree() > 3 {
            return Err(format!("case {}: degree {}", case, script.max_degree()));
        }
        worst = worst.max(script.max_degree());
    }
    Ok(worst)
}

//! Lazy segment tree over a switch path `Z_1..Z_n` with barrier floors
//! `b_1..b_n`.
//!
//! Each node keeps `min(Z_i - b_i)` and `max(Z_i + b_i)` over its range.
//! Pending transforms are affine maps `Z -> s*Z + c` with `s = ±1`.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Affine {
    sign: i64,
    shift: i64,
}

impl Affine {
    const ID: Affine = Affine { sign: 1, shift: 0 };

    /// `self ∘ inner`
    fn after(self, inner: Affine) -> Affine {
        Affine {
            sign: self.sign * inner.sign,
            shift: self.sign * inner.shift + self.shift,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReflectTree {
    n: usize,
    lo: Vec<i64>,
    hi: Vec<i64>,
    lazy: Vec<Affine>,
}

impl ReflectTree {
    /// `path[i]` is `Z_{i+1}` and `floors[i]` is `b_{i+1}`.
    pub fn new(path: &[i64], floors: &[i64]) -> Self {
        assert_eq!(path.len(), floors.len());
        let n = path.len();
        let size = 4 * n.max(1);
        let mut tree = Self {
            n,
            lo: vec![i64::MAX; size],
            hi: vec![i64::MIN; size],
            lazy: vec![Affine::ID; size],
        };
        if n > 0 {
            tree.build(1, 0, n - 1, path, floors);
        }
        tree
    }

    fn build(&mut self, node: usize, l: usize, r: usize, path: &[i64], floors: &[i64]) {
        if l == r {
            self.lo[node] = path[l] - floors[l];
            self.hi[node] = path[l] + floors[l];
            return;
        }
        let mid = (l + r) / 2;
        self.build(2 * node, l, mid, path, floors);
        self.build(2 * node + 1, mid + 1, r, path, floors);
        self.pull(node);
    }

    fn pull(&mut self, node: usize) {
        self.lo[node] = self.lo[2 * node].min(self.lo[2 * node + 1]);
        self.hi[node] = self.hi[2 * node].max(self.hi[2 * node + 1]);
    }

    fn apply(&mut self, node: usize, f: Affine) {
        let (lo, hi) = (self.lo[node], self.hi[node]);
        if f.sign == 1 {
            self.lo[node] = lo + f.shift;
            self.hi[node] = hi + f.shift;
        } else {
            self.lo[node] = f.shift - hi;
            self.hi[node] = f.shift - lo;
        }
        self.lazy[node] = f.after(self.lazy[node]);
    }

    fn push(&mut self, node: usize) {
        let f = self.lazy[node];
        if f != Affine::ID {
            self.apply(2 * node, f);
            self.apply(2 * node + 1, f);
            self.lazy[node] = Affine::ID;
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `Z_i` for 1-based `i`; `Z_0 = 0`.
    pub fn position(&mut self, i: usize) -> i64 {
        assert!(i <= self.n, "position {i} beyond path length {}", self.n);
        if i == 0 {
            return 0;
        }
        let (mut node, mut l, mut r) = (1, 0, self.n - 1);
        while l != r {
            self.push(node);
            let mid = (l + r) / 2;
            if i - 1 <= mid {
                node *= 2;
                r = mid;
            } else {
                node = 2 * node + 1;
                l = mid + 1;
            }
        }
        (self.lo[node] + self.hi[node]) / 2
    }

    /// Reflects the suffix `Z_i, i >= j` about `Z_{j-1}` (1-based `j`).
    pub fn reflect_from(&mut self, j: usize) {
        assert!(
            j >= 1 && j <= self.n,
            "reflect index {j} out of 1..={}",
            self.n
        );
        let pivot = self.position(j - 1);
        self.update(
            1,
            0,
            self.n - 1,
            j - 1,
            Affine {
                sign: -1,
                shift: 2 * pivot,
            },
        );
    }

    fn update(&mut self, node: usize, l: usize, r: usize, from: usize, f: Affine) {
        if r < from {
            return;
        }
        if l >= from {
            self.apply(node, f);
            return;
        }
        self.push(node);
        let mid = (l + r) / 2;
        self.update(2 * node, l, mid, from, f);
        self.update(2 * node + 1, mid + 1, r, from, f);
        self.pull(node);
    }

    /// `min_i (Z_i - b_i)`, or `i64::MAX` for an empty path.
    pub fn min_margin(&self) -> i64 {
        self.lo[1]
    }

    /// Does `Z_i >= b_i` hold for every `i`?
    pub fn above_floors(&self) -> bool {
        self.n == 0 || self.lo[1] >= 0
    }
}

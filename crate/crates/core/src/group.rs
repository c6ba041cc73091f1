//! SU(2) arithmetic on unit quaternions.
//!
//! A quaternion `w + x i + y j + z k` is identified with the matrix
//!
//! ```text
//!   M(q) = [[ w + iz,  x + iy ],
//!           [ -x + iy, w - iz ]]
//! ```
//!
//! which is a homomorphism for the Hamilton product. Tuples of elements are
//! points of `Hom(F_n, SU(2)) = SU(2)^n`; words in the free group evaluate on
//! them letter by letter.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Vector parts shorter than this are treated as central (`±e`).
pub const CENTRAL_EPS: f64 = 1e-12;

/// A unit quaternion, i.e. an element of SU(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Builds an element from arbitrary nonzero quaternion coordinates,
    /// projecting them onto the unit sphere.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidInput(format!(
                "quaternion ({w}, {x}, {y}, {z}) cannot be normalized"
            )));
        }
        Ok(Self {
            w: w / norm,
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Wraps coordinates the caller guarantees to be unit length.
    pub fn from_unit(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// Haar-distributed sample: four standard Gaussians pushed to the 3-sphere.
    pub fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            if let Ok(g) = Self::new(q[0], q[1], q[2], q[3]) {
                return g;
            }
        }
    }

    pub fn w(&self) -> f64 {
        self.w
    }
    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn components(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    fn renormalized(self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    /// Hamilton product, renormalized so drift never accumulates.
    pub fn mul(&self, h: &GroupElement) -> GroupElement {
        let (a0, a1, a2, a3) = (self.w, self.x, self.y, self.z);
        let (b0, b1, b2, b3) = (h.w, h.x, h.y, h.z);
        GroupElement {
            w: a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            x: a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            y: a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            z: a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        }
        .renormalized()
    }

    pub fn inv(&self) -> GroupElement {
        GroupElement {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// `h · self · h⁻¹`
    pub fn conjugate_by(&self, h: &GroupElement) -> GroupElement {
        h.mul(self).mul(&h.inv())
    }

    /// Trace of the matrix view, `2w`.
    pub fn trace(&self) -> f64 {
        2.0 * self.w
    }

    pub fn matrix(&self) -> Matrix2<Complex64> {
        let g = self.renormalized();
        Matrix2::new(
            Complex64::new(g.w, g.z),
            Complex64::new(g.x, g.y),
            Complex64::new(-g.x, g.y),
            Complex64::new(g.w, -g.z),
        )
    }

    /// Rotation axis and class angle: `w = cos α`, `(x, y, z) = sin α · axis`,
    /// with `α ∈ [0, π]`. Central elements report the axis `(0, 0, 1)`.
    pub fn axis_angle(&self) -> ([f64; 3], f64) {
        let s = (self.x * self.x + self.y * self.y + self.z * self.z).sqrt();
        let alpha = s.atan2(self.w);
        if s == 0.0 {
            return ([0.0, 0.0, 1.0], alpha);
        }
        ([self.x / s, self.y / s, self.z / s], alpha)
    }

    pub fn angle(&self) -> f64 {
        self.axis_angle().1
    }

    pub fn conj_class(&self) -> ConjClass {
        ConjClass { t: self.trace() }
    }

    fn vector_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_central(&self) -> bool {
        self.vector_norm() < CENTRAL_EPS
    }

    pub fn distance(&self, other: &GroupElement) -> f64 {
        let d = [
            self.w - other.w,
            self.x - other.x,
            self.y - other.y,
            self.z - other.z,
        ];
        d.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }
}

impl Default for GroupElement {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl std::ops::Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: GroupElement) -> GroupElement {
        GroupElement::mul(&self, &rhs)
    }
}

/// A conjugacy class of SU(2), represented by its trace `t = 2 cos α ∈ [-2, 2]`.
///
/// The maximal torus modulo the Weyl group `Z/2` (acting by `α ↦ -α`) is the
/// interval `[0, π]`, and the trace is a complete invariant on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjClass {
    t: f64,
}

impl ConjClass {
    pub fn from_trace(t: f64) -> Result<Self> {
        if !(-2.0..=2.0).contains(&t) {
            return Err(Error::InvalidInput(format!("trace {t} outside [-2, 2]")));
        }
        Ok(Self { t })
    }

    pub fn trace(&self) -> f64 {
        self.t
    }

    pub fn angle(&self) -> f64 {
        (self.t / 2.0).clamp(-1.0, 1.0).acos()
    }
}

/// An ordered n-tuple of group elements, `n ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tuple {
    elements: Vec<GroupElement>,
}

impl Tuple {
    pub fn new(elements: Vec<GroupElement>) -> Result<Self> {
        if elements.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a tuple needs at least 2 elements, got {}",
                elements.len()
            )));
        }
        Ok(Self { elements })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(vec![GroupElement::IDENTITY; n])
    }

    pub fn haar<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Self::new((0..n).map(|_| GroupElement::haar(rng)).collect())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub(crate) fn elements_mut(&mut self) -> &mut [GroupElement] {
        &mut self.elements
    }

    /// Simultaneous conjugation `h · t · h⁻¹`.
    pub fn conjugate_by(&self, h: &GroupElement) -> Tuple {
        Tuple {
            elements: self.elements.iter().map(|g| g.conjugate_by(h)).collect(),
        }
    }

    /// Normal form of the conjugation orbit.
    ///
    /// The first non-central element is rotated onto the positive `z` torus
    /// (`x = y = 0`, `z ≥ 0`); the residual rotation about `z` is fixed by the
    /// next element with a nonzero `(x, y)` part, which is turned to `x = 0`,
    /// `y ≥ 0`. Central tuples come back unchanged.
    pub fn canonical_form(&self) -> Tuple {
        let Some(p) = self.elements.iter().position(|g| !g.is_central()) else {
            return self.clone();
        };
        let h = align_to_z(&self.elements[p]);
        let mut out = self.conjugate_by(&h);
        {
            let g = &mut out.elements[p];
            let r = g.vector_norm();
            *g = GroupElement::from_unit(g.w, 0.0, 0.0, r);
        }

        let second = out.elements[p + 1..]
            .iter()
            .position(|g| g.x.hypot(g.y) >= CENTRAL_EPS)
            .map(|i| p + 1 + i);
        if let Some(q) = second {
            let g = out.elements[q];
            let phi = std::f64::consts::FRAC_PI_2 - g.y.atan2(g.x);
            let hz = GroupElement::from_unit((phi / 2.0).cos(), 0.0, 0.0, (phi / 2.0).sin());
            for (i, e) in out.elements.iter_mut().enumerate() {
                if i != p {
                    *e = e.conjugate_by(&hz);
                }
            }
            let g = &mut out.elements[q];
            let r = g.x.hypot(g.y);
            *g = GroupElement::from_unit(g.w, 0.0, r, g.z);
        }
        out
    }

    pub fn max_distance(&self, other: &Tuple) -> f64 {
        assert_eq!(self.len(), other.len());
        self.elements
            .iter()
            .zip(&other.elements)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }
}

/// A unit quaternion `h` with `h g h⁻¹` having its vector part on `+z`.
fn align_to_z(g: &GroupElement) -> GroupElement {
    let r = g.vector_norm();
    let (ux, mut uy, mut uz) = (g.x / r, g.y / r, g.z / r);
    // rotate by π about x first when pointing into the lower hemisphere,
    // so 1 + u_z below never cancels
    let pre = if uz < 0.0 {
        uy = -uy;
        uz = -uz;
        GroupElement::from_unit(0.0, 1.0, 0.0, 0.0)
    } else {
        GroupElement::IDENTITY
    };
    // half-angle quaternion (1 + u·z, u × z) turns u onto z
    let turn = GroupElement::new(1.0 + uz, uy, -ux, 0.0).expect("1 + u_z >= 1");
    turn.mul(&pre)
}

/// A freely reduced word in the generators `a_1, …, a_n` and their inverses.
/// Letter `i > 0` is `a_i`, letter `-i` is `a_i⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<i32>,
}

impl Word {
    /// Accepts only already reduced, nonzero letters.
    pub fn new(letters: Vec<i32>) -> Result<Self> {
        if letters.contains(&0) {
            return Err(Error::InvalidInput("letter 0 is not a generator".into()));
        }
        if let Some(position) = letters.windows(2).position(|p| p[0] == -p[1]) {
            return Err(Error::NotReduced { position });
        }
        Ok(Self { letters })
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduced<I: IntoIterator<Item = i32>>(letters: I) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            assert!(l != 0, "letter 0 is not a generator");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self { letters: out }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn generator(i: usize) -> Self {
        Self {
            letters: vec![i as i32],
        }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::reduced(self.letters.iter().chain(&other.letters).copied())
    }

    /// Replaces each generator `a_i` by `images[i-1]` and freely reduces,
    /// failing once the running length passes `cap`.
    pub fn substitute(&self, images: &[Word], cap: usize) -> Result<Word> {
        let mut out: Vec<i32> = Vec::new();
        for &l in &self.letters {
            let idx = l.unsigned_abs() as usize;
            let image = images.get(idx - 1).ok_or(Error::LetterOutOfRange {
                letter: l,
                n: images.len(),
            })?;
            let push = |out: &mut Vec<i32>, c: i32| {
                if out.last() == Some(&-c) {
                    out.pop();
                } else {
                    out.push(c);
                }
            };
            if l > 0 {
                image.letters.iter().for_each(|&c| push(&mut out, c));
            } else {
                image.letters.iter().rev().for_each(|&c| push(&mut out, -c));
            }
            if out.len() > cap {
                return Err(Error::WordTooLong { len: out.len(), cap });
            }
        }
        Ok(Word { letters: out })
    }

    /// Left-to-right product of `t_i` or `t_i⁻¹`; the empty word is `e`.
    pub fn eval(&self, t: &Tuple) -> Result<GroupElement> {
        let n = t.len();
        let mut acc = GroupElement::IDENTITY;
        for &l in &self.letters {
            let i = l.unsigned_abs() as usize;
            if i == 0 || i > n {
                return Err(Error::LetterOutOfRange { letter: l, n });
            }
            let g = t.get(i - 1);
            acc = if l > 0 { acc.mul(g) } else { acc.mul(&g.inv()) };
        }
        Ok(acc)
    }
}

/// `[t_1, t_2] = t_1 t_2 t_1⁻¹ t_2⁻¹`
pub fn commutator_word() -> Word {
    Word {
        letters: vec![1, 2, -1, -2],
    }
}

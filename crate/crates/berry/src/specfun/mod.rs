//! Covariance kernels of the planar random wave and their leading forms.
//!
//! With `k = 2 pi sqrt(E)` and separation `z = x - y`, the base kernel is
//! `r(z) = J0(k |z|)`. First derivatives bring in `J1`, second derivatives
//! `J2`. Normalizing the gradient by `sqrt(2 pi^2 E)` makes every kernel a
//! correlation of unit-variance variables, so all normalized entries lie in
//! `[-1, 1]` and obey the scaling law `rtilde_E(z) = rtilde_1(sqrt(E) z)`.

mod bessel;

pub use bessel::{bessel_j, bessel_j012};
pub(crate) use bessel::bessel_j_sequence;

use crate::{BerryError, Result};
use std::f64::consts::{FRAC_PI_4, PI};

/// Variance of each gradient component: `2 pi^2 E`.
pub fn gradient_variance(energy: f64) -> f64 {
    2.0 * PI * PI * energy
}

/// Displacements shorter than this are treated as zero (degenerate limits).
pub const ZERO_DISPLACEMENT: f64 = 1e-14;

fn check_energy(energy: f64) -> Result<()> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(BerryError::invalid(format!("energy must be > 0, got {energy}")));
    }
    Ok(())
}

/// Base covariance `J0(2 pi sqrt(E) |dx|)`; equals 1 at `dx = 0`.
pub fn kernel_r(energy: f64, dx: [f64; 2]) -> Result<f64> {
    check_energy(energy)?;
    let norm = dx[0].hypot(dx[1]);
    bessel_j(0, 2.0 * PI * energy.sqrt() * norm)
}

/// The six distinct normalized kernels at a displacement.
///
/// `r01`, `r02` are the covariances of the field at `x` with the normalized
/// gradient at `y`; the opposite pairing flips their sign. `r12 = r21`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizedKernels {
    pub r: f64,
    pub r01: f64,
    pub r02: f64,
    pub r11: f64,
    pub r12: f64,
    pub r22: f64,
}

impl NormalizedKernels {
    /// Entry `rtilde_{k,l}` with the sign convention of the covariance matrix
    /// (`rtilde_{i,0} = -rtilde_{0,i}` for i = 1, 2).
    pub fn entry(&self, k: usize, l: usize) -> f64 {
        match (k, l) {
            (0, 0) => self.r,
            (0, 1) => self.r01,
            (0, 2) => self.r02,
            (1, 0) => -self.r01,
            (2, 0) => -self.r02,
            (1, 1) => self.r11,
            (2, 2) => self.r22,
            (1, 2) | (2, 1) => self.r12,
            _ => panic!("kernel index out of range: ({k}, {l})"),
        }
    }
}

/// Normalized kernels at energy `E` and displacement `dx`.
pub fn normalized_kernels(energy: f64, dx: [f64; 2]) -> Result<NormalizedKernels> {
    check_energy(energy)?;
    if !dx[0].is_finite() || !dx[1].is_finite() {
        return Err(BerryError::invalid("non-finite displacement"));
    }
    let norm = dx[0].hypot(dx[1]);
    if norm < ZERO_DISPLACEMENT {
        return Ok(NormalizedKernels {
            r: 1.0,
            r01: 0.0,
            r02: 0.0,
            r11: 1.0,
            r12: 0.0,
            r22: 1.0,
        });
    }
    let u = 2.0 * PI * energy.sqrt() * norm;
    let [j0, j1, j2] = bessel_j012(u)?;
    let e1 = dx[0] / norm;
    let e2 = dx[1] / norm;
    // r0i / sqrt(2 pi^2 E) = sqrt(2) e_i J1;  rij / (2 pi^2 E) as below
    let s2 = std::f64::consts::SQRT_2;
    Ok(NormalizedKernels {
        r: j0,
        r01: s2 * e1 * j1,
        r02: s2 * e2 * j1,
        r11: j0 + (1.0 - 2.0 * e1 * e1) * j2,
        r22: j0 + (1.0 - 2.0 * e2 * e2) * j2,
        r12: -2.0 * e1 * e2 * j2,
    })
}

/// Every covariance entry of the vector `(B(x), B(y), grad B(x), grad B(y))`.
#[derive(Clone, Debug)]
pub struct KernelSet {
    /// Dimensionless correlation `r`.
    pub r: f64,
    /// `r_{0,i}`, units `sqrt(E)`.
    pub r0i: [f64; 2],
    /// `r_{i,j}`, units `E`.
    pub rij: [[f64; 2]; 2],
    /// Normalized kernels `rtilde_{k,l}`, k, l in {0, 1, 2}.
    pub rtilde: [[f64; 3]; 3],
    /// The full 6x6 covariance matrix, ordering
    /// `(B(x), B(y), d1 B(x), d2 B(x), d1 B(y), d2 B(y))`.
    pub sigma: [[f64; 6]; 6],
}

/// Assemble the full kernel set at a displacement. At `dx = 0` the analytic
/// degenerate limits are returned instead of evaluating 0/0 direction
/// cosines.
pub fn kernel_set(energy: f64, dx: [f64; 2]) -> Result<KernelSet> {
    let nk = normalized_kernels(energy, dx)?;
    let grad_sd = gradient_variance(energy).sqrt();
    let gv = gradient_variance(energy);

    let r0i = [nk.r01 * grad_sd, nk.r02 * grad_sd];
    let rij = [
        [nk.r11 * gv, nk.r12 * gv],
        [nk.r12 * gv, nk.r22 * gv],
    ];
    let mut rtilde = [[0.0; 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            rtilde[k][l] = nk.entry(k, l);
        }
    }

    let r = nk.r;
    let (a, b) = (r0i[0], r0i[1]);
    let (c11, c12, c22) = (rij[0][0], rij[0][1], rij[1][1]);
    let sigma = [
        [1.0, r, 0.0, 0.0, a, b],
        [r, 1.0, -a, -b, 0.0, 0.0],
        [0.0, -a, gv, 0.0, c11, c12],
        [0.0, -b, 0.0, gv, c12, c22],
        [a, 0.0, c11, c12, gv, 0.0],
        [b, 0.0, c12, c22, 0.0, gv],
    ];

    Ok(KernelSet {
        r,
        r0i,
        rij,
        rtilde,
        sigma,
    })
}

/// Identifier for one of the six normalized kernels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelKind {
    R,
    R01,
    R02,
    R11,
    R12,
    R22,
}

impl KernelKind {
    pub const ALL: [KernelKind; 6] = [
        KernelKind::R,
        KernelKind::R01,
        KernelKind::R02,
        KernelKind::R11,
        KernelKind::R12,
        KernelKind::R22,
    ];

    /// Which oscillation the radial factor carries.
    pub fn osc(self) -> Osc {
        match self {
            KernelKind::R01 | KernelKind::R02 => Osc::Sin,
            _ => Osc::Cos,
        }
    }

    /// Angular factor decomposed as `amp * cos^a(theta) * sin^b(theta)`.
    pub fn angular_monomial(self) -> (f64, u32, u32) {
        let s2 = std::f64::consts::SQRT_2;
        match self {
            KernelKind::R => (1.0, 0, 0),
            KernelKind::R01 => (s2, 1, 0),
            KernelKind::R02 => (s2, 0, 1),
            KernelKind::R11 => (2.0, 2, 0),
            KernelKind::R22 => (2.0, 0, 2),
            KernelKind::R12 => (2.0, 1, 1),
        }
    }

    /// Exact kernel value at polar displacement `(phi, theta)`, energy `E`.
    pub fn eval(self, energy: f64, phi: f64, theta: f64) -> Result<f64> {
        let nk = normalized_kernels(energy, [phi * theta.cos(), phi * theta.sin()])?;
        Ok(match self {
            KernelKind::R => nk.r,
            KernelKind::R01 => nk.r01,
            KernelKind::R02 => nk.r02,
            KernelKind::R11 => nk.r11,
            KernelKind::R12 => nk.r12,
            KernelKind::R22 => nk.r22,
        })
    }
}

/// Phase carried by the radial leading factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Osc {
    Cos,
    Sin,
}

impl Osc {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Osc::Cos => x.cos(),
            Osc::Sin => x.sin(),
        }
    }
}

/// Factorized leading form `h(theta) g(phi)` of one normalized kernel.
#[derive(Clone, Copy, Debug)]
pub struct AsymptoticForm {
    pub kind: KernelKind,
    pub energy: f64,
}

impl AsymptoticForm {
    pub fn new(kind: KernelKind, energy: f64) -> Result<Self> {
        check_energy(energy)?;
        Ok(AsymptoticForm { kind, energy })
    }

    /// Angular factor `h(theta)`.
    pub fn h(&self, theta: f64) -> f64 {
        let (amp, a, b) = self.kind.angular_monomial();
        amp * theta.cos().powi(a as i32) * theta.sin().powi(b as i32)
    }

    /// Radial factor `g(phi)` at the stored energy; requires `phi > 0`.
    pub fn g(&self, phi: f64) -> Result<f64> {
        if !(phi > 0.0) {
            return Err(BerryError::invalid(format!("radius must be > 0, got {phi}")));
        }
        let se = self.energy.sqrt();
        let phase = 2.0 * PI * se * phi - FRAC_PI_4;
        Ok(self.kind.osc().eval(phase) / (PI * (se * phi).sqrt()))
    }

    pub fn leading(&self, phi: f64, theta: f64) -> Result<f64> {
        Ok(self.h(theta) * self.g(phi)?)
    }
}

/// Leading term of the requested kernel at polar displacement `(phi, theta)`.
pub fn asymptotic_leading(kind: KernelKind, energy: f64, phi: f64, theta: f64) -> Result<f64> {
    AsymptoticForm::new(kind, energy)?.leading(phi, theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_r_basics() {
        assert_eq!(kernel_r(1.0, [0.0, 0.0]).unwrap(), 1.0);
        assert!(kernel_r(0.0, [0.1, 0.0]).is_err());
        assert!(kernel_r(-1.0, [0.1, 0.0]).is_err());
    }

    #[test]
    fn kernel_r_is_isotropic() {
        let e = 3.7;
        let d = 0.83;
        let base = kernel_r(e, [d, 0.0]).unwrap();
        for k in 1..8 {
            let th = k as f64 * 0.7;
            let rot = kernel_r(e, [d * th.cos(), d * th.sin()]).unwrap();
            assert!((base - rot).abs() < 1e-14);
        }
    }

    // u*/(2 pi) with u* the first J0 root from the rational-series oracle.
    #[test]
    fn kernel_r_vanishes_at_scaled_root() {
        let u_star = 2.404_825_557_695_773;
        let d = u_star / (2.0 * PI);
        assert!(kernel_r(1.0, [d, 0.0]).unwrap().abs() < 1e-10);
    }

    #[test]
    fn kernel_set_degenerate_limits() {
        let e = 7.0;
        let ks = kernel_set(e, [0.0, 0.0]).unwrap();
        assert_eq!(ks.r, 1.0);
        assert_eq!(ks.r0i, [0.0, 0.0]);
        let gv = gradient_variance(e);
        assert_eq!(ks.rij[0][0], gv);
        assert_eq!(ks.rij[1][1], gv);
        assert_eq!(ks.rij[0][1], 0.0);
    }

    #[test]
    fn off_axis_cross_kernel_vanishes_on_axis() {
        // dx on the x1-axis: the product dx1*dx2 = 0
        let ks = kernel_set(4.0, [0.37, 0.0]).unwrap();
        assert_eq!(ks.rij[0][1], 0.0);
    }

    #[test]
    fn central_difference_check_r01() {
        // r_{0,1} vs numerical derivative d/dy1 of r(x - y) at E = 1, |dx| = 0.3
        let e = 1.0;
        let dx = [0.3, 0.0];
        let h = 1e-5;
        let num = (kernel_r(e, [dx[0] - h, dx[1]]).unwrap()
            - kernel_r(e, [dx[0] + h, dx[1]]).unwrap())
            / (2.0 * h);
        let ks = kernel_set(e, dx).unwrap();
        let rel = (ks.r0i[0] - num).abs() / num.abs();
        assert!(rel < 1e-6, "relative error {rel}");
    }

    #[test]
    fn central_difference_check_rij() {
        // r_{1,1} = d/dx1 d/dy1 r: mixed second central difference
        let e = 2.0;
        let z = [0.23, 0.11];
        let h = 1e-4;
        let f = |zz: [f64; 2]| kernel_r(e, zz).unwrap();
        // d/dx1 d/dy1 r(x-y) = -d^2/dz1^2 r(z)
        let d2 = (f([z[0] + h, z[1]]) - 2.0 * f(z) + f([z[0] - h, z[1]])) / (h * h);
        let ks = kernel_set(e, z).unwrap();
        assert!(
            (ks.rij[0][0] + d2).abs() / ks.rij[0][0].abs() < 1e-5,
            "{} vs {}",
            ks.rij[0][0],
            -d2
        );
    }

    #[test]
    fn normalized_entries_bounded_and_consistent() {
        let e = 100.0;
        for i in 0..200 {
            let phi = 0.01 + i as f64 * 0.013;
            let th = i as f64 * 0.37;
            let ks = kernel_set(e, [phi * th.cos(), phi * th.sin()]).unwrap();
            let sd = gradient_variance(e).sqrt();
            for k in 0..3 {
                for l in 0..3 {
                    assert!(ks.rtilde[k][l].abs() <= 1.0 + 1e-12);
                }
            }
            assert_eq!(ks.rtilde[0][0], ks.r);
            assert!((ks.rtilde[0][1] - ks.r0i[0] / sd).abs() < 1e-15);
            assert!((ks.rtilde[1][2] - ks.rij[0][1] / (sd * sd)).abs() < 1e-15);
        }
    }

    #[test]
    fn scaling_law() {
        // rtilde_E(dx) = rtilde_1(sqrt(E) dx)
        for &e in &[4.0f64, 100.0, 1e4] {
            let se = e.sqrt();
            for i in 0..50 {
                let dx = [0.002 + 0.003 * i as f64, 0.001 * i as f64];
                let hi = normalized_kernels(e, dx).unwrap();
                let lo = normalized_kernels(1.0, [dx[0] * se, dx[1] * se]).unwrap();
                for (a, b) in [
                    (hi.r, lo.r),
                    (hi.r01, lo.r01),
                    (hi.r02, lo.r02),
                    (hi.r11, lo.r11),
                    (hi.r12, lo.r12),
                    (hi.r22, lo.r22),
                ] {
                    // the two argument orderings differ by a few ulps of a
                    // large Bessel argument
                    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn asymptotic_leading_base_kernel_is_angle_free() {
        let v1 = asymptotic_leading(KernelKind::R, 1.0, 20.0, 0.3).unwrap();
        let v2 = asymptotic_leading(KernelKind::R, 1.0, 20.0, 2.9).unwrap();
        assert_eq!(v1, v2);
    }

    #[test]
    fn asymptotic_leading_r02_vanishes_at_theta_zero() {
        let v = asymptotic_leading(KernelKind::R02, 1.0, 15.0, 0.0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn asymptotic_leading_rejects_nonpositive_radius() {
        assert!(asymptotic_leading(KernelKind::R, 1.0, 0.0, 0.1).is_err());
        assert!(asymptotic_leading(KernelKind::R, 1.0, -2.0, 0.1).is_err());
    }

    #[test]
    fn leading_forms_match_r11_formula() {
        // 2 cos^2(theta) cos(2 pi sqrt(E) phi - pi/4) / (pi sqrt(sqrt(E) phi))
        let (e, phi, th): (f64, f64, f64) = (1.0, 17.0, 0.9);
        let expected = 2.0 * th.cos().powi(2)
            * (2.0 * PI * phi - FRAC_PI_4).cos()
            / (PI * phi.sqrt());
        let got = asymptotic_leading(KernelKind::R11, e, phi, th).unwrap();
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn small_argument_laws() {
        // rtilde_ii -> 1, rtilde_0i = O(psi), rtilde_12 = O(psi^2)
        let mut psi = 0.1;
        while psi > 1e-4 {
            for th in [0.0f64, 0.7, 2.1] {
                let nk =
                    normalized_kernels(1.0, [psi * th.cos(), psi * th.sin()]).unwrap();
                assert!((nk.r11 - 1.0).abs() < 30.0 * psi * psi);
                assert!((nk.r22 - 1.0).abs() < 30.0 * psi * psi);
                assert!(nk.r01.abs() <= 5.0 * psi);
                assert!(nk.r02.abs() <= 5.0 * psi);
                assert!(nk.r12.abs() <= 10.0 * psi * psi);
            }
            psi *= 0.5;
        }
    }
}

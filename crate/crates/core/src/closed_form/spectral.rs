//! Scalar spectral families entering the closed-form propagators.
//!
//! Every family is a combination of `cos(τ√λ)`, `sin(τ√λ)/√λ`,
//! `√λ·sin(τ√λ)` and `(cos(τ√λ) − 1)/λ` with `λ = λ±(N)`. These are entire
//! functions of `λ`, evaluated here with the principal complex square root so
//! negative `λ` continues onto the hyperbolic branch, and with series
//! expansions near `λ = 0`.

use num_complex::Complex64 as C64;

/// Below this `|τ²λ|` the removable-singularity series is used.
const SERIES_THRESHOLD: f64 = 1e-8;

pub fn cos_root(lambda: f64, tau: f64) -> C64 {
    (C64::from(lambda).sqrt() * tau).cos()
}

/// `sin(τ√λ)/√λ`, equal to `τ` at `λ = 0`.
pub fn sinc_root(lambda: f64, tau: f64) -> C64 {
    let x = tau * tau * lambda;
    if x.abs() < SERIES_THRESHOLD {
        return C64::from(tau * (1.0 - x / 6.0 + x * x / 120.0));
    }
    let root = C64::from(lambda).sqrt();
    (root * tau).sin() / root
}

/// `√λ·sin(τ√λ)`.
pub fn root_sin(lambda: f64, tau: f64) -> C64 {
    sinc_root(lambda, tau) * lambda
}

/// `(cos(τ√λ) − 1)/λ`, equal to `−τ²/2` at `λ = 0`.
pub fn cosm1_over(lambda: f64, tau: f64) -> C64 {
    let half = sinc_root(lambda, tau / 2.0);
    -2.0 * half * half
}

/// Eigenvalue data of `B_{3/2}²` on the excitation sector labelled by `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectral3 {
    pub n: i64,
    pub d: f64,
    pub sqrt_d: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub w_plus: f64,
    pub w_minus: f64,
}

impl Spectral3 {
    pub fn at(n: i64) -> Self {
        let nf = n as f64;
        let d = 16.0 * nf * nf + 9.0;
        let sqrt_d = d.sqrt();
        Self {
            n,
            d,
            sqrt_d,
            lambda_plus: 5.0 * nf + sqrt_d,
            lambda_minus: 5.0 * nf - sqrt_d,
            v_plus: -2.0 * nf - 3.0 + sqrt_d,
            v_minus: -2.0 * nf - 3.0 - sqrt_d,
            w_plus: 2.0 * nf - 3.0 + sqrt_d,
            w_minus: 2.0 * nf - 3.0 - sqrt_d,
        }
    }
}

/// Cosine-type (even in τ) entries of `e^{−iτB_{3/2}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Even3 {
    F2,
    F1,
    F0,
    Fm1,
    H1,
}

/// Sine-type (odd in τ) entries of `e^{−iτB_{3/2}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Odd3 {
    F1,
    F0,
    H1,
    H0,
}

impl Even3 {
    pub fn eval(self, n: i64, tau: f64) -> C64 {
        let s = Spectral3::at(n);
        let cp = cos_root(s.lambda_plus, tau);
        let cm = cos_root(s.lambda_minus, tau);
        let num = match self {
            Even3::F2 => s.v_plus * cp - s.v_minus * cm,
            Even3::F1 => s.w_plus * cp - s.w_minus * cm,
            Even3::F0 => s.v_plus * cm - s.v_minus * cp,
            Even3::Fm1 => s.w_plus * cm - s.w_minus * cp,
            Even3::H1 => cp - cm,
        };
        num / (2.0 * s.sqrt_d)
    }
}

impl Odd3 {
    pub fn eval(self, n: i64, tau: f64) -> C64 {
        let s = Spectral3::at(n);
        let num = match self {
            Odd3::F1 => s.w_plus * sinc_root(s.lambda_plus, tau) - s.w_minus * sinc_root(s.lambda_minus, tau),
            Odd3::F0 => s.v_plus * sinc_root(s.lambda_minus, tau) - s.v_minus * sinc_root(s.lambda_plus, tau),
            Odd3::H1 => root_sin(s.lambda_plus, tau) - root_sin(s.lambda_minus, tau),
            Odd3::H0 => sinc_root(s.lambda_plus, tau) - sinc_root(s.lambda_minus, tau),
        };
        num / (2.0 * s.sqrt_d)
    }
}

/// Eigenvalue data of `B_2²` on the excitation sector labelled by `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectral4 {
    pub n: i64,
    pub d: f64,
    pub sqrt_d: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub u_plus: f64,
    pub u_minus: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub w_plus: f64,
    pub w_minus: f64,
}

impl Spectral4 {
    pub fn at(n: i64) -> Self {
        let nf = n as f64;
        let d = 4.0 * nf * nf + 4.0 * nf + 9.0;
        let sqrt_d = d.sqrt();
        let k = 1.5f64.sqrt();
        Self {
            n,
            d,
            sqrt_d,
            lambda_plus: 10.0 * nf + 5.0 + 3.0 * sqrt_d,
            lambda_minus: 10.0 * nf + 5.0 - 3.0 * sqrt_d,
            u_plus: 0.5 * (-3.0 + sqrt_d),
            u_minus: 0.5 * (-3.0 - sqrt_d),
            v_plus: k * (2.0 * nf - 1.0 + sqrt_d),
            v_minus: k * (2.0 * nf - 1.0 - sqrt_d),
            w_plus: k * (2.0 * nf + 3.0 + sqrt_d),
            w_minus: k * (2.0 * nf + 3.0 - sqrt_d),
        }
    }
}

/// Which transcription of the four-atom closed form to evaluate.
///
/// `AsPrinted` reproduces the published `f_0` and `F_{-1}` verbatim; both
/// disagree with the exact exponential (see `ERRATA.md`). `Corrected` is the
/// default everywhere else in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormulaVariant {
    #[default]
    Corrected,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Even4 {
    F2,
    F1,
    F0,
    Fm1,
    Fm2,
    H1,
    H0,
    Hm1,
    K0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Odd4 {
    F1,
    Fm1,
    H1,
    H0,
    Hm1,
}

impl Even4 {
    pub fn eval(self, n: i64, tau: f64, variant: FormulaVariant) -> C64 {
        let s = Spectral4::at(n);
        let nf = n as f64;
        let cp = cos_root(s.lambda_plus, tau);
        let cm = cos_root(s.lambda_minus, tau);
        let mp = cosm1_over(s.lambda_plus, tau);
        let mm = cosm1_over(s.lambda_minus, tau);
        let one = C64::from(1.0);
        match self {
            Even4::F2 => one + 4.0 * (nf - 1.0) * (s.u_plus * mp - s.u_minus * mm) / s.sqrt_d,
            Even4::F1 => (s.u_plus * cp - s.u_minus * cm) / s.sqrt_d,
            Even4::F0 => {
                let weight = match variant {
                    FormulaVariant::Corrected => 1.0,
                    FormulaVariant::AsPrinted => 2.0,
                };
                one + weight * (s.v_plus * s.w_plus * mp - s.v_minus * s.w_minus * mm) / s.sqrt_d
            }
            Even4::Fm1 => (s.u_plus * cm - s.u_minus * cp) / s.sqrt_d,
            Even4::Fm2 => one + 4.0 * (nf + 2.0) * (s.u_plus * mm - s.u_minus * mp) / s.sqrt_d,
            Even4::H1 => 2.0 * (s.v_plus * mp - s.v_minus * mm) / s.sqrt_d,
            Even4::H0 => (cp - cm) / s.sqrt_d,
            Even4::Hm1 => 2.0 * (s.w_plus * mp - s.w_minus * mm) / s.sqrt_d,
            Even4::K0 => 4.0 * (mp - mm) / s.sqrt_d,
        }
    }
}

impl Odd4 {
    pub fn eval(self, n: i64, tau: f64, variant: FormulaVariant) -> C64 {
        let s = Spectral4::at(n);
        let sp = sinc_root(s.lambda_plus, tau);
        let sm = sinc_root(s.lambda_minus, tau);
        match self {
            Odd4::F1 => (s.u_plus * sp - s.u_minus * sm) / s.sqrt_d,
            Odd4::Fm1 => match variant {
                FormulaVariant::Corrected => (s.u_plus * sm - s.u_minus * sp) / s.sqrt_d,
                FormulaVariant::AsPrinted => {
                    let rp = C64::from(s.lambda_plus).sqrt();
                    let rm = C64::from(s.lambda_minus).sqrt();
                    (s.u_plus / rp * (rm * tau).sin() - s.u_minus / rm * (rp * tau).sin()) / s.sqrt_d
                }
            },
            Odd4::H1 => 2.0 * (s.v_plus * sp - s.v_minus * sm) / s.sqrt_d,
            Odd4::H0 => (sp - sm) / s.sqrt_d,
            Odd4::Hm1 => 2.0 * (s.w_plus * sp - s.w_minus * sm) / s.sqrt_d,
        }
    }
}

/// Coefficients of the even and odd powers of `B_{3/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub xi: f64,
}

impl PowerCoefficients {
    pub fn at(power: u32, n: i64) -> Self {
        let s = Spectral3::at(n);
        let lp = s.lambda_plus.powi(power as i32);
        let lm = s.lambda_minus.powi(power as i32);
        let den = 2.0 * s.sqrt_d;
        Self {
            alpha: (s.v_plus * lp - s.v_minus * lm) / den,
            beta: (s.w_plus * lp - s.w_minus * lm) / den,
            gamma: (s.v_plus * lm - s.v_minus * lp) / den,
            delta: (s.w_plus * lm - s.w_minus * lp) / den,
            xi: (lp - lm) / den,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: f64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn even_functions_across_branches() {
        let tau = 0.9;
        assert!(close(cos_root(4.0, tau), (2.0 * tau).cos(), 1e-15));
        assert!(close(cos_root(-4.0, tau), (2.0 * tau).cosh(), 1e-15));
        assert_eq!(cos_root(-4.0, tau).im, 0.0);
        assert!(close(sinc_root(4.0, tau), (2.0 * tau).sin() / 2.0, 1e-15));
        assert!(close(sinc_root(-4.0, tau), (2.0 * tau).sinh() / 2.0, 1e-15));
        assert_eq!(sinc_root(0.0, tau), C64::from(tau));
        assert!(close(sinc_root(1e-12, tau), tau, 1e-12));
        assert!(close(root_sin(9.0, tau), 3.0 * (3.0 * tau).sin(), 1e-14));
        assert!(close(cosm1_over(0.0, tau), -tau * tau / 2.0, 1e-16));
        assert!(close(cosm1_over(2.5, tau), ((2.5f64.sqrt() * tau).cos() - 1.0) / 2.5, 1e-15));
        assert!(close(cosm1_over(-2.5, tau), ((2.5f64.sqrt() * tau).cosh() - 1.0) / -2.5, 1e-14));
    }

    #[test]
    fn series_and_direct_agree_at_threshold() {
        let tau = 1.0;
        for lambda in [0.99e-8, 1.01e-8, -0.99e-8, -1.01e-8] {
            let root = C64::from(lambda).sqrt();
            let direct = (root * tau).sin() / root;
            assert!((sinc_root(lambda, tau) - direct).norm() < 1e-15);
        }
    }

    #[test]
    fn spectral3_invariants() {
        for n in -3..20 {
            let s = Spectral3::at(n);
            let nf = n as f64;
            assert!((s.lambda_plus + s.lambda_minus - 10.0 * nf).abs() < 1e-12);
            assert!((s.lambda_plus * s.lambda_minus - (25.0 * nf * nf - s.d)).abs() < 1e-9);
        }
        let s0 = Spectral3::at(0);
        assert_eq!(s0.v_plus, 0.0);
        assert_eq!(s0.w_plus, 0.0);
        assert_eq!(s0.lambda_minus, -3.0);
        let s1 = Spectral3::at(1);
        assert_eq!((s1.lambda_plus, s1.lambda_minus), (10.0, 0.0));
    }

    #[test]
    fn spectral4_invariants() {
        for n in 0..40 {
            assert!(Spectral4::at(n).d >= 9.0);
        }
        let s0 = Spectral4::at(0);
        assert_eq!(s0.u_plus, 0.0);
        assert_eq!(s0.w_minus, 0.0);
        assert!(s0.lambda_minus < 0.0);
    }

    #[test]
    fn three_atom_f0_at_zero() {
        for tau in [0.1, 1.0, 5.0] {
            assert!(close(Even3::F0.eval(0, tau), (3f64.sqrt() * tau).cos(), 1e-14));
        }
    }

    #[test]
    fn families_are_identity_at_tau_zero() {
        for n in -2..10 {
            assert!(close(Even3::F2.eval(n, 0.0), 1.0, 1e-14));
            assert!(close(Even3::F1.eval(n, 0.0), 1.0, 1e-14));
            assert!(close(Even3::F0.eval(n, 0.0), 1.0, 1e-14));
            assert!(close(Even3::Fm1.eval(n, 0.0), 1.0, 1e-14));
            assert!(close(Even3::H1.eval(n, 0.0), 0.0, 1e-14));
            for f in [Even4::F2, Even4::F1, Even4::F0, Even4::Fm1, Even4::Fm2] {
                assert!(close(f.eval(n, 0.0, FormulaVariant::Corrected), 1.0, 1e-14), "{f:?} at {n}");
            }
            for f in [Even4::H1, Even4::H0, Even4::Hm1, Even4::K0] {
                assert!(close(f.eval(n, 0.0, FormulaVariant::Corrected), 0.0, 1e-14));
            }
        }
    }

    #[test]
    fn power_coefficient_identities() {
        for n in -2..12 {
            let p0 = PowerCoefficients::at(0, n);
            let p1 = PowerCoefficients::at(1, n);
            assert!(p0.xi.abs() < 1e-15);
            assert!((p1.xi - 1.0).abs() < 1e-13);
            assert!((p0.beta - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn power_coefficient_recurrences() {
        // Row 0 and row 1 of B² times the matching columns of B^{2n}, normal-ordered.
        for power in 0..=3u32 {
            for x in -1i64..15 {
                let xf = x as f64;
                let cur = PowerCoefficients::at(power, x);
                let next = PowerCoefficients::at(power + 1, x);
                let alpha = 3.0 * (xf - 1.0) * cur.alpha + 12.0 * (xf - 1.0) * xf * cur.xi;
                let beta = (7.0 * xf - 3.0) * cur.beta + 12.0 * xf * (xf + 1.0) * cur.xi;
                let scale = next.alpha.abs().max(next.beta.abs()).max(1.0);
                assert!((next.alpha - alpha).abs() / scale < 1e-13, "alpha power {power} x {x}");
                assert!((next.beta - beta).abs() / scale < 1e-13, "beta power {power} x {x}");
            }
        }
    }
}

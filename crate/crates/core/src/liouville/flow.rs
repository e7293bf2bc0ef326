use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::{compare, EvalPoint, Expr};
use crate::sampling::SamplingBox;

use super::{compose_gamma, GeneratingFunction};

/// `phi(z) = a + b z + c z^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl MobiusCoefficients {
    /// Read off the coefficients and confirm that `phi` is exactly this
    /// quadratic on a box around the origin.
    pub fn of(phi: &Expr) -> Result<Self> {
        let mut origin = EvalPoint::new();
        origin.set_complex("z", Complex64::new(0.0, 0.0));
        let a = phi.eval(&origin)?;
        let b = phi.d("z")?.eval(&origin)?;
        let c = phi.d("z")?.d("z")?.eval(&origin)? / 2.0;
        let coeffs = MobiusCoefficients { a, b, c };
        let bx = SamplingBox::new().complex("z", (-1.0, 1.0), (-1.0, 1.0));
        let cmp = compare(phi, &coeffs.polynomial(), &bx, 20, 1e-12, 0)?;
        if !cmp.equal {
            return Err(Error::Invalid(format!(
                "phi = {phi} is not a polynomial of degree <= 2; no closed-form flow"
            )));
        }
        Ok(coeffs)
    }

    fn polynomial(&self) -> Expr {
        let z = Expr::complex_var("z");
        Expr::complex_constant(self.a)
            .add(&Expr::complex_constant(self.b).mul(&z))
            .add(&Expr::complex_constant(self.c).mul(&z.powf(2.0)))
    }

    /// Entries `(alpha, beta, gamma, delta)` of `exp(lambda M)` with
    /// `M = [[b/2, a], [-c, -b/2]]`.
    pub fn matrix(&self, lambda: f64) -> [Complex64; 4] {
        let half = self.b / 2.0;
        let m = [half, self.a, -self.c, -half];
        // M is traceless, so exp(lambda M) = cosh(lambda mu) I + sinh(lambda mu)/mu M
        // with mu^2 = -det M.
        let mu2 = half * half - self.a * self.c;
        let mu = mu2.sqrt();
        let (ch, sh_over_mu) = if mu.norm() < 1e-8 {
            (Complex64::new(1.0, 0.0) + mu2 * lambda * lambda / 2.0, Complex64::new(lambda, 0.0) * (Complex64::new(1.0, 0.0) + mu2 * lambda * lambda / 6.0))
        } else {
            ((mu * lambda).cosh(), (mu * lambda).sinh() / mu)
        };
        [ch + sh_over_mu * m[0], sh_over_mu * m[1], sh_over_mu * m[2], ch + sh_over_mu * m[3]]
    }
}

/// Time-`lambda` flow of `dz/dlambda = phi(z)` for quadratic `phi`, as the
/// Möbius map `(alpha z + beta) / (gamma z + delta)`.
pub fn mobius_flow(phi: &Expr, lambda: f64) -> Result<Expr> {
    let m = MobiusCoefficients::of(phi)?.matrix(lambda);
    let z = Expr::complex_var("z");
    let c = |v: Complex64| Expr::complex_constant(v);
    let num = c(m[0]).mul(&z).add(&c(m[1]));
    let den = c(m[2]).mul(&z).add(&c(m[3]));
    Ok(num.div(&den).simplify())
}

/// Image of a generating function under the symmetry flow of `phi`.
pub fn orbit_gamma(g: &GeneratingFunction, phi: &Expr, lambda: f64) -> Result<GeneratingFunction> {
    if lambda == 0.0 {
        return Ok(g.clone());
    }
    let mut out = compose_gamma(g, &mobius_flow(phi, lambda)?)?;
    out.label = format!("{} under exp({lambda} * [{phi}])", g.label);
    Ok(out)
}

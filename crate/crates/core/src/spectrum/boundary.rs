use crate::error::{Error, Result};
use crate::matrix::{CMatrix, C};
use crate::regularization::{build_associated_matrix, AssociatedMatrix, ExpressionSpec};

/// `U(y) = y^[p] + sum_{j=1}^{p} u_j y^[j-1]` at one endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryForm {
    pub p: usize,
    /// `u_1, ..., u_p`.
    pub u: Vec<C>,
}

impl BoundaryForm {
    pub fn new(p: usize, u: Vec<C>) -> Self {
        Self { p, u }
    }

    /// `y^[p]` alone.
    pub fn plain(p: usize) -> Self {
        Self { p, u: vec![C::new(0.0, 0.0); p] }
    }

    /// Coefficient row acting on `(y^[0], ..., y^[n-1])`.
    pub fn row(&self, n: usize) -> Vec<C> {
        let mut row = vec![C::new(0.0, 0.0); n];
        row[self.p] = C::new(1.0, 0.0);
        for (j, u) in self.u.iter().enumerate() {
            row[j] += u;
        }
        row
    }
}

/// Applies a form to a column of quasi-derivatives at its endpoint.
pub fn boundary_form(form: &BoundaryForm, column: &[C]) -> C {
    column[form.p] + form.u.iter().zip(column).map(|(u, y)| u * y).sum::<C>()
}

/// Separated boundary conditions: `r` forms at `x = 0`, `n - r` at `x = 1`,
/// and an optional extra form at `x = 0` defining the weight numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec {
    pub left: Vec<BoundaryForm>,
    pub right: Vec<BoundaryForm>,
    pub weight: Option<BoundaryForm>,
}

impl BoundarySpec {
    pub fn new(left: Vec<BoundaryForm>, right: Vec<BoundaryForm>, weight: Option<BoundaryForm>) -> Self {
        Self { left, right, weight }
    }

    pub fn r(&self) -> usize {
        self.left.len()
    }

    pub fn n(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::validation(
                "boundary",
                format!("{} forms given for order {n}", self.n()),
            ));
        }
        if self.left.is_empty() || self.right.is_empty() {
            return Err(Error::validation("boundary.r", "r must lie in 1..n-1"));
        }
        for (side, forms) in [("left", &self.left), ("right", &self.right)] {
            for (i, f) in forms.iter().enumerate() {
                if f.p >= n {
                    return Err(Error::validation(format!("boundary.{side}[{i}].p"), format!("p = {} exceeds n - 1", f.p)));
                }
                if f.u.len() != f.p {
                    return Err(Error::validation(
                        format!("boundary.{side}[{i}].u"),
                        format!("expected {} coefficients, got {}", f.p, f.u.len()),
                    ));
                }
                if forms[..i].iter().any(|g| g.p == f.p) {
                    return Err(Error::validation(format!("boundary.{side}[{i}].p"), "p values must be distinct on each side"));
                }
            }
        }
        if let Some(w) = &self.weight {
            if w.p >= n {
                return Err(Error::validation("weight_form.p0", format!("p0 = {} exceeds n - 1", w.p)));
            }
            if w.u.len() != w.p {
                return Err(Error::validation("weight_form.u0", format!("expected {} coefficients, got {}", w.p, w.u.len())));
            }
            if self.left.iter().any(|f| f.p == w.p) {
                return Err(Error::validation("weight_form.p0", "p0 must differ from every left p_s"));
            }
        }
        Ok(())
    }

    pub fn p_left(&self) -> Vec<usize> {
        self.left.iter().map(|f| f.p).collect()
    }

    pub fn p_right(&self) -> Vec<usize> {
        self.right.iter().map(|f| f.p).collect()
    }

    /// Same `p_s` with every `u` set to zero.
    pub fn zeroed(&self) -> Self {
        let z = |f: &BoundaryForm| BoundaryForm::plain(f.p);
        Self {
            left: self.left.iter().map(z).collect(),
            right: self.right.iter().map(z).collect(),
            weight: self.weight.as_ref().map(z),
        }
    }

    pub(crate) fn rows(forms: &[&BoundaryForm], n: usize) -> CMatrix {
        CMatrix::from_fn(forms.len(), n, |i, j| forms[i].row(n)[j])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Expression(ExpressionSpec),
    /// Arbitrary associated matrix with companion superdiagonal, `L2` diagonal, zero trace.
    Raw(AssociatedMatrix),
}

/// A boundary value problem `Y' = (F + Lambda) Y`, `U_s(y) = 0`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub operator: Operator,
    pub boundary: BoundarySpec,
    f: AssociatedMatrix,
}

impl ProblemSpec {
    pub fn new(operator: Operator, boundary: BoundarySpec) -> Result<Self> {
        let f = match &operator {
            Operator::Expression(e) => build_associated_matrix(e)?,
            Operator::Raw(m) => AssociatedMatrix::from_raw(m.matrix().clone())?,
        };
        boundary.validate(f.n())?;
        Ok(Self { operator, boundary, f })
    }

    pub fn from_expression(spec: ExpressionSpec, boundary: BoundarySpec) -> Result<Self> {
        Self::new(Operator::Expression(spec), boundary)
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }

    pub fn r(&self) -> usize {
        self.boundary.r()
    }

    pub fn matrix(&self) -> &AssociatedMatrix {
        &self.f
    }

    /// The problem with zero coefficients and zero `u_{s,j}`, same `n`, `r`, `p_s`.
    pub fn zero_coefficient(&self) -> Self {
        let n = self.n();
        let f = AssociatedMatrix::zero(n);
        let operator = match &self.operator {
            Operator::Expression(e) => Operator::Expression(e.zeroed()),
            Operator::Raw(_) => Operator::Raw(f.clone()),
        };
        Self {
            operator,
            boundary: self.boundary.zeroed(),
            f,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_examples() {
        let col = [C::new(2.0, 0.0), C::new(3.0, 0.0), C::new(5.0, 1.0)];
        assert_eq!(boundary_form(&BoundaryForm::plain(0), &col), col[0]);
        assert_eq!(boundary_form(&BoundaryForm::plain(2), &col), col[2]);
        let f = BoundaryForm::new(2, vec![C::new(1.0, 0.0), C::new(0.5, 0.0)]);
        assert_eq!(boundary_form(&f, &col), col[2] + col[0] + col[1] * 0.5);
        assert_eq!(f.row(3), vec![C::new(1.0, 0.0), C::new(0.5, 0.0), C::new(1.0, 0.0)]);
    }

    #[test]
    fn validation_names_fields() {
        let b = BoundarySpec::new(vec![BoundaryForm::plain(0), BoundaryForm::plain(0)], vec![BoundaryForm::plain(0)], None);
        assert!(matches!(b.validate(3), Err(Error::Validation { field, .. }) if field == "boundary.left[1].p"));
        let b = BoundarySpec::new(vec![BoundaryForm::plain(0)], vec![BoundaryForm::plain(0)], Some(BoundaryForm::plain(0)));
        assert!(matches!(b.validate(2), Err(Error::Validation { field, .. }) if field == "weight_form.p0"));
    }
}

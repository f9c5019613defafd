use super::{ModelError, VassSpec};

/// Finite-state process description. Lowered to a zero-dimensional
/// [`VassSpec`], which is what every engine consumes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FiniteSpec {
    pub initial_states: Vec<String>,
    /// `(source, label, target)` with `label` written `!!a` or `??a`.
    pub transitions: Vec<(String, String, String)>,
}

impl FiniteSpec {
    pub fn new() -> Self {
        FiniteSpec::default()
    }

    pub fn initial(mut self, state: &str) -> Self {
        self.initial_states.push(state.to_owned());
        self
    }

    pub fn transition(mut self, source: &str, label: &str, target: &str) -> Self {
        self.transitions
            .push((source.to_owned(), label.to_owned(), target.to_owned()));
        self
    }

    pub fn into_vass(self) -> Result<VassSpec, ModelError> {
        let mut builder = VassSpec::builder(0);
        for s in &self.initial_states {
            builder.add_initial(s, &[]);
        }
        for (source, label, target) in &self.transitions {
            builder.add_transition(source, label, &[], target);
        }
        builder.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{Semantics, TransitionLabel, WellStructured};

    #[test]
    fn lowers_to_dimension_zero() {
        let p = FiniteSpec::new()
            .initial("q")
            .transition("q", "??a", "q'")
            .into_vass()
            .unwrap();
        assert_eq!(p.dim(), 0);
        let a = p.letter_id("a").unwrap();
        assert_eq!(
            p.successors(&p.config("q", &[]), TransitionLabel::receive(a)),
            vec![p.config("q'", &[])]
        );
        assert!(p.broadcast_basis(a).is_empty());
        assert!(p.covered_by_initial(&p.config("q", &[])));
        assert!(!p.covered_by_initial(&p.config("q'", &[])));
    }
}

use super::LoweringError;
use crate::circuit::{Circuit, Gate};

/// Noise estimation circuit: the payload with every SX replaced by X.
pub fn build_nec(c: &Circuit) -> Result<Circuit, LoweringError> {
    c.ensure_native()?;
    let ops = c
        .ops()
        .iter()
        .map(|g| match *g {
            Gate::Sx(q) => Gate::X(q),
            other => other,
        })
        .collect();
    let name = if c.name.is_empty() {
        String::new()
    } else {
        format!("{}_nec", c.name)
    };
    Ok(Circuit::with_ops(c.n_qubits(), ops)?.named(name))
}

/// Ideal output of an SX-free native circuit started from `|0…0>`.
///
/// X flips its bit; CZ and RZ only attach phases to basis states.
pub fn nec_ideal_output(nec: &Circuit) -> Result<u64, LoweringError> {
    nec.ensure_native()?;
    let mut k = 0u64;
    for (i, g) in nec.ops().iter().enumerate() {
        match *g {
            Gate::X(q) => k ^= 1 << q,
            Gate::Sx(_) => return Err(LoweringError::SxInNec(i)),
            _ => {}
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{gate_counts, GateKind};

    #[test]
    fn replaces_sx_only() {
        let c = Circuit::with_ops(2, vec![Gate::Sx(0), Gate::Cz(0, 1), Gate::Rz(0.7, 1)]).unwrap();
        let nec = build_nec(&c).unwrap();
        assert_eq!(nec.ops(), &[Gate::X(0), Gate::Cz(0, 1), Gate::Rz(0.7, 1)]);
        assert!(build_nec(&nec).unwrap().structurally_eq(&nec));
        let plain = Circuit::with_ops(2, vec![Gate::X(1), Gate::Cz(0, 1)]).unwrap();
        assert!(build_nec(&plain).unwrap().structurally_eq(&plain));
    }

    #[test]
    fn counts_move_from_sx_to_x() {
        let c = Circuit::with_ops(
            2,
            vec![Gate::Sx(0), Gate::Sx(1), Gate::X(0), Gate::Cz(0, 1)],
        )
        .unwrap();
        let before = gate_counts(&c);
        let after = gate_counts(&build_nec(&c).unwrap());
        assert_eq!(after[&GateKind::Sx], 0);
        assert_eq!(
            after[&GateKind::X],
            before[&GateKind::X] + before[&GateKind::Sx]
        );
        assert_eq!(after[&GateKind::Cz], before[&GateKind::Cz]);
    }

    #[test]
    fn ideal_output_examples() {
        let c = Circuit::with_ops(2, vec![Gate::X(0)]).unwrap();
        assert_eq!(nec_ideal_output(&c).unwrap(), 0b01);
        let phases = Circuit::with_ops(2, vec![Gate::Cz(0, 1), Gate::Rz(0.4, 0)]).unwrap();
        assert_eq!(nec_ideal_output(&phases).unwrap(), 0);
        let sx = Circuit::with_ops(1, vec![Gate::X(0), Gate::Sx(0)]).unwrap();
        assert_eq!(nec_ideal_output(&sx), Err(LoweringError::SxInNec(1)));
        let h = Circuit::with_ops(1, vec![Gate::H(0)]).unwrap();
        assert!(build_nec(&h).is_err());
    }
}

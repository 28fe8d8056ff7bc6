//! Line-based circuit text format.
//!
//! ```text
//! # comment
//! qubits 2
//! sx q0
//! rz(1.5707963267948966) q1
//! cz q0,q1
//! ```
//!
//! Angles are decimal literals. The serializer writes the shortest decimal
//! that parses back to the identical `f64`.

use std::fmt::Write as _;

use super::{Circuit, CircuitError, Gate, GateKind};

pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut n_qubits: Option<usize> = None;
    let mut ops = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col0 = content.len() - content.trim_start().len() + 1;
        let syntax = |column: usize, message: String| CircuitError::Syntax {
            line: line_no,
            column,
            message,
        };

        let Some(n) = n_qubits else {
            let rest = trimmed
                .strip_prefix("qubits")
                .filter(|r| r.starts_with(char::is_whitespace))
                .ok_or_else(|| syntax(col0, "expected header `qubits N`".into()))?;
            let count: usize = rest
                .trim()
                .parse()
                .map_err(|_| syntax(col0 + 7, format!("invalid qubit count `{}`", rest.trim())))?;
            if count == 0 {
                return Err(CircuitError::NoQubits);
            }
            n_qubits = Some(count);
            continue;
        };

        let (head, args) = match trimmed.find(char::is_whitespace) {
            Some(p) => (&trimmed[..p], trimmed[p..].trim()),
            None => (trimmed, ""),
        };
        let (name, angle) = match head.find('(') {
            Some(open) => {
                let close = head
                    .rfind(')')
                    .filter(|&c| c == head.len() - 1)
                    .ok_or_else(|| syntax(col0 + open, "unclosed `(`".into()))?;
                let literal = &head[open + 1..close];
                let value: f64 = literal
                    .trim()
                    .parse()
                    .map_err(|_| syntax(col0 + open + 1, format!("invalid angle `{literal}`")))?;
                (&head[..open], Some(value))
            }
            None => (head, None),
        };
        let kind = GateKind::from_name(&name.to_ascii_lowercase())
            .ok_or_else(|| CircuitError::UnknownGate(name.to_string()))?;
        if kind.has_angle() != angle.is_some() {
            let message = if kind.has_angle() {
                format!("gate `{name}` requires an angle")
            } else {
                format!("gate `{name}` takes no angle")
            };
            return Err(syntax(col0, message));
        }
        if args.is_empty() {
            return Err(syntax(col0 + head.len(), "missing qubit operands".into()));
        }
        let args_col = col0 + trimmed.find(args).unwrap_or(0);
        let mut qubits = Vec::new();
        let mut offset = 0;
        for token in args.split(',') {
            let t = token.trim();
            let col = args_col + offset + (token.len() - token.trim_start().len());
            offset += token.len() + 1;
            let index = t
                .strip_prefix('q')
                .and_then(|d| d.parse::<usize>().ok())
                .ok_or_else(|| syntax(col, format!("invalid qubit operand `{t}`")))?;
            qubits.push(index);
        }
        let gate = Gate::from_parts(kind, &qubits, angle)?;
        gate.validate(n)?;
        ops.push(gate);
    }

    let n = n_qubits.ok_or(CircuitError::Syntax {
        line: text.lines().count().max(1),
        column: 1,
        message: "missing header `qubits N`".into(),
    })?;
    Ok(Circuit::from_validated(n, ops, String::new()))
}

const MIN_SIGNIFICANT_DIGITS: usize = 15;

/// Shortest round-trip decimal, zero-padded to at least 15 significant digits.
fn format_angle(t: f64) -> String {
    let s = format!("{t:?}");
    let (mantissa, exponent) = match s.find('e') {
        Some(i) => s.split_at(i),
        None => (s.as_str(), ""),
    };
    let significant = mantissa
        .trim_start_matches('-')
        .chars()
        .filter(char::is_ascii_digit)
        .skip_while(|&c| c == '0')
        .count()
        .max(1);
    let mut m = mantissa.to_string();
    if !m.contains('.') {
        m.push('.');
    }
    for _ in significant..MIN_SIGNIFICANT_DIGITS {
        m.push('0');
    }
    m + exponent
}

pub fn serialize_circuit(c: &Circuit) -> String {
    let mut out = format!("qubits {}", c.n_qubits());
    for g in c.ops() {
        out.push('\n');
        out.push_str(g.kind().name());
        if let Some(t) = g.angle() {
            let _ = write!(out, "({})", format_angle(t));
        }
        let qs: Vec<String> = g.qubits().iter().map(|q| format!("q{q}")).collect();
        let _ = write!(out, " {}", qs.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn angle_formatting() {
        assert_eq!(format_angle(0.5), "0.500000000000000");
        assert_eq!(format_angle(-3.0), "-3.00000000000000");
        assert_eq!(format_angle(0.0), "0.000000000000000");
        assert_eq!(format_angle(FRAC_PI_2), "1.5707963267948966");
        assert_eq!(format_angle(1e-20), "1.00000000000000e-20");
        for t in [
            0.5,
            -3.0,
            0.0,
            1e-20,
            123456.789,
            -2.5e300,
            f64::MIN_POSITIVE,
        ] {
            assert_eq!(
                format_angle(t).parse::<f64>().unwrap().to_bits(),
                t.to_bits()
            );
        }
    }

    #[test]
    fn parses_basic_ops() {
        let c = parse_circuit("qubits 2\nsx q0\ncz q0,q1").unwrap();
        assert_eq!(c.n_qubits(), 2);
        assert_eq!(c.ops(), &[Gate::Sx(0), Gate::Cz(0, 1)]);
    }

    #[test]
    fn parses_angle() {
        let c = parse_circuit("qubits 1\nrz(1.5707963267948966) q0").unwrap();
        assert_eq!(c.ops(), &[Gate::Rz(FRAC_PI_2, 0)]);
    }

    #[test]
    fn out_of_range_qubit() {
        let err = parse_circuit("qubits 2\ncz q0,q5").unwrap_err();
        assert_eq!(
            err,
            CircuitError::QubitOutOfRange {
                qubit: 5,
                n_qubits: 2
            }
        );
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header comment\n\nqubits 3 # three\n  h q2  # trailing\n\ncp(0.25) q0, q2\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.ops(), &[Gate::H(2), Gate::Cp(0.25, 0, 2)]);
    }

    #[test]
    fn syntax_errors_report_position() {
        match parse_circuit("qubits 2\nsx q0\n  cz q0,qx") {
            Err(CircuitError::Syntax { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, 9);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_circuit("sx q0"),
            Err(CircuitError::Syntax {
                line: 1,
                column: 1,
                ..
            })
        ));
        assert!(matches!(
            parse_circuit("qubits 1\nrz q0"),
            Err(CircuitError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_circuit("qubits 1\nrz(abc) q0"),
            Err(CircuitError::Syntax {
                line: 2,
                column: 4,
                ..
            })
        ));
        assert!(matches!(
            parse_circuit(""),
            Err(CircuitError::Syntax { .. })
        ));
    }

    #[test]
    fn unknown_gate_and_arity() {
        assert_eq!(
            parse_circuit("qubits 2\nswap q0,q1"),
            Err(CircuitError::UnknownGate("swap".into()))
        );
        assert!(matches!(
            parse_circuit("qubits 2\ncz q0"),
            Err(CircuitError::Arity { .. })
        ));
        assert!(matches!(
            parse_circuit("qubits 2\nx q0,q1"),
            Err(CircuitError::Arity { .. })
        ));
    }

    #[test]
    fn serializes() {
        let c = Circuit::with_ops(1, vec![Gate::X(0)]).unwrap();
        assert_eq!(serialize_circuit(&c), "qubits 1\nx q0");
        let empty = Circuit::new(2).unwrap();
        assert_eq!(serialize_circuit(&empty), "qubits 2");
        let r = Circuit::with_ops(2, vec![Gate::Rz(FRAC_PI_2, 1), Gate::Cp(2.0, 0, 1)]).unwrap();
        assert_eq!(
            serialize_circuit(&r),
            "qubits 2\nrz(1.5707963267948966) q1\ncp(2.00000000000000) q0,q1"
        );
    }

    fn native_gate(n: usize) -> impl Strategy<Value = Gate> {
        let q = 0..n;
        prop_oneof![
            q.clone().prop_map(Gate::Sx),
            q.clone().prop_map(Gate::X),
            (
                any::<f64>().prop_filter("finite", |t| t.is_finite()),
                q.clone()
            )
                .prop_map(|(t, q)| Gate::Rz(t, q)),
            (q.clone(), 1..n).prop_map(move |(a, d)| Gate::Cz(a, (a + d) % n)),
        ]
    }

    proptest! {
        #[test]
        fn round_trip_random_native(n in 2usize..10, seed_ops in prop::collection::vec(native_gate(10), 0..120)) {
            let ops: Vec<Gate> = seed_ops.into_iter().filter(|g| g.validate(n).is_ok()).collect();
            let c = Circuit::with_ops(n, ops).unwrap();
            let back = parse_circuit(&serialize_circuit(&c)).unwrap();
            prop_assert!(back.structurally_eq(&c));
        }
    }

    #[test]
    fn round_trip_100_gate_native_circuit() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 6;
        let mut c = Circuit::new(n).unwrap();
        while c.len() < 100 {
            let q = rng.gen_range(0..n);
            let g = match rng.gen_range(0..4) {
                0 => Gate::Sx(q),
                1 => Gate::X(q),
                2 => Gate::Rz(rng.gen_range(-10.0..10.0), q),
                _ => Gate::Cz(q, (q + rng.gen_range(1..n)) % n),
            };
            c.push(g).unwrap();
        }
        let back = parse_circuit(&serialize_circuit(&c)).unwrap();
        assert!(back.structurally_eq(&c));
    }
}

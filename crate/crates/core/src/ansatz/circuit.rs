use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::gate::{GateKind, GateOp};
use crate::error::{QaeError, Result};
use crate::sim::{QubitIndex, StateVector};

const CIRCUIT_HEADER: &str = "QAECIRC v1";

/// Parameterized circuit plus the trash/compressed partition of its qubits.
///
/// Parameter slots may be shared by several gates (QCNN weight sharing).
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    n_qubits: usize,
    ops: Vec<GateOp>,
    n_params: usize,
    trash: Vec<QubitIndex>,
    compressed: Vec<QubitIndex>,
}

impl CircuitSpec {
    pub fn new(
        n_qubits: usize,
        ops: Vec<GateOp>,
        n_params: usize,
        trash: Vec<QubitIndex>,
        compressed: Vec<QubitIndex>,
    ) -> Result<Self> {
        let spec = Self {
            n_qubits,
            ops,
            n_params,
            trash,
            compressed,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(QaeError::Validation(msg));
        let mut used = vec![false; self.n_params];
        for (i, op) in self.ops.iter().enumerate() {
            if let Some(&q) = op.qubits.iter().find(|&&q| q >= self.n_qubits) {
                return invalid(format!("op {i} ({}) addresses qubit {q}", op.kind));
            }
            for &s in &op.slots {
                if s >= self.n_params {
                    return invalid(format!("op {i} ({}) uses slot {s} of {}", op.kind, self.n_params));
                }
                used[s] = true;
            }
        }
        if let Some(s) = used.iter().position(|u| !u) {
            return invalid(format!("parameter slot {s} is never used"));
        }
        let trash: BTreeSet<_> = self.trash.iter().copied().collect();
        let comp: BTreeSet<_> = self.compressed.iter().copied().collect();
        if trash.len() != self.trash.len() || comp.len() != self.compressed.len() {
            return invalid("trash/compressed lists contain duplicates".into());
        }
        if !trash.is_disjoint(&comp) {
            return invalid("trash and compressed qubits overlap".into());
        }
        if trash.len() + comp.len() != self.n_qubits
            || trash.iter().chain(&comp).any(|&q| q >= self.n_qubits)
        {
            return invalid("trash and compressed qubits must cover every qubit".into());
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn trash(&self) -> &[QubitIndex] {
        &self.trash
    }

    pub fn compressed(&self) -> &[QubitIndex] {
        &self.compressed
    }

    /// Number of two-qubit gates (CNOTs and controlled rotations).
    pub fn two_qubit_gate_count(&self) -> usize {
        self.ops.iter().filter(|op| op.kind.n_qubits() == 2).count()
    }

    pub fn cnot_count(&self) -> usize {
        self.ops.iter().filter(|op| op.kind == GateKind::Cnot).count()
    }

    /// Replaces the trash/compressed partition.
    pub fn with_partition(mut self, trash: Vec<QubitIndex>, compressed: Vec<QubitIndex>) -> Result<Self> {
        self.trash = trash;
        self.compressed = compressed;
        self.validate()?;
        Ok(self)
    }

    /// Keeps the last `c` qubits as compressed and marks the rest as trash.
    pub fn with_compressed_count(self, c: usize) -> Result<Self> {
        if c > self.n_qubits {
            return Err(QaeError::Validation(format!(
                "cannot keep {c} of {} qubits",
                self.n_qubits
            )));
        }
        let n = self.n_qubits;
        self.with_partition((0..n - c).collect(), (n - c..n).collect())
    }

    /// The inverse circuit: gates reversed and each replaced by its adjoint.
    /// Parameter slots and the partition are unchanged.
    pub fn invert(&self) -> CircuitSpec {
        Self {
            ops: self.ops.iter().rev().map(GateOp::inverse).collect(),
            ..self.clone()
        }
    }

    /// Relabels qubits through `map` into a register of `n_total` qubits.
    /// The partition is carried through the same map.
    pub fn remap(&self, map: &[QubitIndex], n_total: usize) -> Result<CircuitSpec> {
        if map.len() != self.n_qubits {
            return Err(QaeError::DimensionMismatch {
                expected: self.n_qubits,
                got: map.len(),
            });
        }
        let mut ops = self.ops.clone();
        for op in &mut ops {
            for q in &mut op.qubits {
                *q = map[*q];
            }
        }
        let trash: Vec<_> = self.trash.iter().map(|&q| map[q]).collect();
        let compressed: Vec<_> = self.compressed.iter().map(|&q| map[q]).collect();
        // Qubits outside the image of `map` count as trash for the new register.
        let image: BTreeSet<_> = map.iter().copied().collect();
        let extra: Vec<_> = (0..n_total).filter(|q| !image.contains(q)).collect();
        CircuitSpec::new(
            n_total,
            ops,
            self.n_params,
            trash.into_iter().chain(extra).collect(),
            compressed,
        )
    }

    pub(crate) fn check_inputs(&self, params: &[f64], state: &StateVector) -> Result<()> {
        if params.len() != self.n_params {
            return Err(QaeError::DimensionMismatch {
                expected: self.n_params,
                got: params.len(),
            });
        }
        if state.n_qubits() != self.n_qubits {
            return Err(QaeError::DimensionMismatch {
                expected: self.n_qubits,
                got: state.n_qubits(),
            });
        }
        Ok(())
    }

    /// Applies every gate with angles bound from `params`.
    pub fn run(&self, params: &[f64], input: &StateVector) -> Result<StateVector> {
        self.check_inputs(params, input)?;
        let mut state = input.clone();
        self.apply_in_place(params, &mut state);
        Ok(state)
    }

    pub(crate) fn apply_in_place(&self, params: &[f64], state: &mut StateVector) {
        for op in &self.ops {
            op.apply(state, params);
        }
    }

    /// Text dump: header, register metadata, then one gate per line as
    /// `KIND qubits slots adjoint` with comma-separated lists (`-` if empty).
    pub fn to_text(&self) -> String {
        let join = |v: &[usize]| {
            if v.is_empty() {
                "-".to_string()
            } else {
                v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
            }
        };
        let mut out = String::new();
        writeln!(out, "{CIRCUIT_HEADER}").unwrap();
        writeln!(out, "qubits {}", self.n_qubits).unwrap();
        writeln!(out, "params {}", self.n_params).unwrap();
        writeln!(out, "trash {}", join(&self.trash)).unwrap();
        writeln!(out, "compressed {}", join(&self.compressed)).unwrap();
        writeln!(out, "ops {}", self.ops.len()).unwrap();
        for op in &self.ops {
            writeln!(
                out,
                "{} {} {} {}",
                op.kind,
                join(&op.qubits),
                join(&op.slots),
                u8::from(op.adjoint)
            )
            .unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<CircuitSpec> {
        let err = |line: usize, msg: &str| QaeError::Format {
            format: "QAECIRC",
            line,
            msg: msg.to_string(),
        };
        let parse_list = |line: usize, s: &str| -> Result<Vec<usize>> {
            if s == "-" {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|t| t.parse().map_err(|_| err(line, &format!("bad index '{t}'"))))
                .collect()
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        match lines.next() {
            Some((_, CIRCUIT_HEADER)) => {}
            _ => return Err(err(1, "missing 'QAECIRC v1' header")),
        }
        let mut field = |name: &str| -> Result<(usize, String)> {
            let (ln, l) = lines.next().ok_or_else(|| err(0, &format!("missing '{name}' line")))?;
            let rest = l
                .strip_prefix(name)
                .map(str::trim)
                .ok_or_else(|| err(ln, &format!("expected '{name}'")))?;
            Ok((ln, rest.to_string()))
        };
        let (ln, v) = field("qubits")?;
        let n_qubits: usize = v.parse().map_err(|_| err(ln, "bad qubit count"))?;
        let (ln, v) = field("params")?;
        let n_params: usize = v.parse().map_err(|_| err(ln, "bad parameter count"))?;
        let (ln, v) = field("trash")?;
        let trash = parse_list(ln, &v)?;
        let (ln, v) = field("compressed")?;
        let compressed = parse_list(ln, &v)?;
        let (ln, v) = field("ops")?;
        let n_ops: usize = v.parse().map_err(|_| err(ln, "bad op count"))?;
        let mut ops = Vec::with_capacity(n_ops);
        for (ln, l) in lines.filter(|(_, l)| !l.is_empty()) {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 4 {
                return Err(err(ln, "expected 'KIND qubits slots adjoint'"));
            }
            let kind: GateKind = toks[0].parse().map_err(|_| err(ln, "unknown gate kind"))?;
            let qubits = parse_list(ln, toks[1])?;
            let slots = parse_list(ln, toks[2])?;
            let mut op = GateOp::new(kind, &qubits, &slots).map_err(|e| err(ln, &e.to_string()))?;
            op.adjoint = match toks[3] {
                "0" => false,
                "1" => true,
                _ => return Err(err(ln, "adjoint flag must be 0 or 1")),
            };
            ops.push(op);
        }
        if ops.len() != n_ops {
            return Err(err(0, &format!("declared {n_ops} ops, found {}", ops.len())));
        }
        CircuitSpec::new(n_qubits, ops, n_params, trash, compressed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ry_circuit() -> CircuitSpec {
        CircuitSpec::new(1, vec![GateOp::one(GateKind::Ry, 0, &[0])], 1, vec![], vec![0]).unwrap()
    }

    #[test]
    fn empty_circuit_leaves_input_unchanged() {
        let c = CircuitSpec::new(2, vec![], 0, vec![0], vec![1]).unwrap();
        let s = StateVector::from_real(2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        assert_eq!(c.run(&[], &s).unwrap(), s);
        assert_eq!(c.invert(), c);
    }

    #[test]
    fn single_ry_pi_flips_zero() {
        let out = ry_circuit().run(&[PI], &StateVector::zero(1).unwrap()).unwrap();
        assert!((out.prob_one(0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn run_rejects_length_mismatch() {
        let c = ry_circuit();
        assert!(matches!(
            c.run(&[], &StateVector::zero(1).unwrap()),
            Err(QaeError::DimensionMismatch { .. })
        ));
        assert!(c.run(&[0.1], &StateVector::zero(2).unwrap()).is_err());
    }

    #[test]
    fn validation_catches_bad_specs() {
        let op = GateOp::one(GateKind::Ry, 0, &[0]);
        // unused slot
        assert!(CircuitSpec::new(1, vec![op.clone()], 2, vec![], vec![0]).is_err());
        // slot out of range
        assert!(CircuitSpec::new(1, vec![GateOp::one(GateKind::Ry, 0, &[3])], 1, vec![], vec![0]).is_err());
        // partition gaps and overlaps
        assert!(CircuitSpec::new(2, vec![op.clone()], 1, vec![0], vec![]).is_err());
        assert!(CircuitSpec::new(2, vec![op.clone()], 1, vec![0, 1], vec![1]).is_err());
        // qubit out of range
        assert!(CircuitSpec::new(1, vec![GateOp::one(GateKind::X, 2, &[])], 0, vec![], vec![0]).is_err());
    }

    #[test]
    fn text_round_trip_and_errors() {
        let mut ops = vec![
            GateOp::one(GateKind::U3, 0, &[0, 1, 2]),
            GateOp::two(GateKind::Cnot, 1, 0, &[]),
            GateOp::two(GateKind::Crz, 0, 2, &[1]),
        ];
        ops[2].adjoint = true;
        let c = CircuitSpec::new(3, ops, 3, vec![0, 1], vec![2]).unwrap();
        let text = c.to_text();
        assert!(text.starts_with("QAECIRC v1\n"));
        assert_eq!(CircuitSpec::from_text(&text).unwrap(), c);

        assert!(matches!(
            CircuitSpec::from_text("QAECIRC v2\n"),
            Err(QaeError::Format { line: 1, .. })
        ));
        let broken = text.replace("CNOT 1,0 - 0", "CNOT 1,1 - 0");
        assert!(matches!(
            CircuitSpec::from_text(&broken),
            Err(QaeError::Format { line: 8, .. })
        ));
    }

    #[test]
    fn remap_moves_gates_and_partition() {
        let c = CircuitSpec::new(
            2,
            vec![GateOp::two(GateKind::Cnot, 0, 1, &[])],
            0,
            vec![0],
            vec![1],
        )
        .unwrap();
        let r = c.remap(&[3, 1], 4).unwrap();
        assert_eq!(r.ops()[0].qubits, vec![3, 1]);
        assert_eq!(r.compressed(), &[1]);
        assert_eq!(r.trash(), &[3, 0, 2]);
    }
}

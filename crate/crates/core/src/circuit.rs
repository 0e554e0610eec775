//! Gate-level circuit container shared by the kernel builders and the simulator.
//!
//! Registers are little-endian: bit `i` of a register value lives on
//! `register.qubits[i]`.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Qubit = usize;

/// Identifier of a measurement record produced while running a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeasId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    X(Qubit),
    Y(Qubit),
    Z(Qubit),
    H(Qubit),
    S(Qubit),
    Sdg(Qubit),
    Cnot(Qubit, Qubit),
    Cz(Qubit, Qubit),
    Toffoli(Qubit, Qubit, Qubit),
    /// Controlled swap `(control, a, b)`; counted as one Toffoli.
    Cswap(Qubit, Qubit, Qubit),
    MeasureZ(Qubit, MeasId),
    /// X-basis measurement. The qubit is left in `|+>` or `|->`.
    MeasureX(Qubit, MeasId),
}

impl Gate {
    pub fn qubits(&self) -> Vec<Qubit> {
        match *self {
            Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::H(q) | Gate::S(q) | Gate::Sdg(q) => vec![q],
            Gate::Cnot(a, b) | Gate::Cz(a, b) => vec![a, b],
            Gate::Toffoli(a, b, c) | Gate::Cswap(a, b, c) => vec![a, b, c],
            Gate::MeasureZ(q, _) | Gate::MeasureX(q, _) => vec![q],
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Gate::MeasureZ(..) | Gate::MeasureX(..))
    }

    pub fn is_toffoli_class(&self) -> bool {
        matches!(self, Gate::Toffoli(..) | Gate::Cswap(..))
    }

    fn mnemonic(&self) -> &'static str {
        match self {
            Gate::X(_) => "X",
            Gate::Y(_) => "Y",
            Gate::Z(_) => "Z",
            Gate::H(_) => "H",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::Cnot(..) => "CNOT",
            Gate::Cz(..) => "CZ",
            Gate::Toffoli(..) => "TOFFOLI",
            Gate::Cswap(..) => "CSWAP",
            Gate::MeasureZ(..) => "MZ",
            Gate::MeasureX(..) => "MX",
        }
    }

    /// Inverse of a unitary gate; measurements have no inverse.
    pub fn inverse(&self) -> Option<Gate> {
        match *self {
            Gate::S(q) => Some(Gate::Sdg(q)),
            Gate::Sdg(q) => Some(Gate::S(q)),
            Gate::MeasureZ(..) | Gate::MeasureX(..) => None,
            g => Some(g),
        }
    }
}

/// A gate, optionally applied only when a prior measurement returned 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Op {
    pub gate: Gate,
    pub cond: Option<MeasId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Address,
    Output,
    Workspace,
    Dirty,
    Flag,
    Control,
    System,
    Data,
}

impl Role {
    fn as_str(&self) -> &'static str {
        match self {
            Role::Address => "address",
            Role::Output => "output",
            Role::Workspace => "workspace",
            Role::Dirty => "dirty",
            Role::Flag => "flag",
            Role::Control => "control",
            Role::System => "system",
            Role::Data => "data",
        }
    }
}

impl FromStr for Role {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "address" => Role::Address,
            "output" => Role::Output,
            "workspace" => Role::Workspace,
            "dirty" => Role::Dirty,
            "flag" => Role::Flag,
            "control" => Role::Control,
            "system" => Role::System,
            "data" => Role::Data,
            other => return Err(Error::Parse { line: 0, msg: format!("unknown register role `{other}`") }),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub role: Role,
    pub qubits: Vec<Qubit>,
}

impl Register {
    pub fn width(&self) -> usize {
        self.qubits.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub registers: Vec<Register>,
    pub ops: Vec<Op>,
    pub n_measurements: usize,
}

impl Circuit {
    pub fn empty(n_qubits: usize) -> Self {
        Circuit { n_qubits, registers: Vec::new(), ops: Vec::new(), n_measurements: 0 }
    }

    /// Number of Toffoli gates, with each controlled swap counted once.
    pub fn toffoli_count(&self) -> usize {
        self.ops.iter().filter(|op| op.gate.is_toffoli_class()).count()
    }

    pub fn measurement_count(&self) -> usize {
        self.ops.iter().filter(|op| op.gate.is_measurement()).count()
    }

    pub fn has_measurements(&self) -> bool {
        self.ops.iter().any(|op| op.gate.is_measurement() || op.cond.is_some())
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    /// Looks up a register, failing with a descriptive error.
    pub fn reg(&self, name: &str) -> Result<&Register> {
        self.register(name).ok_or_else(|| Error::Invalid(format!("circuit has no register `{name}`")))
    }

    /// Checks qubit ranges, distinct operands and measurement ordering.
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.n_measurements];
        for (i, op) in self.ops.iter().enumerate() {
            let qs = op.gate.qubits();
            for (a, &q) in qs.iter().enumerate() {
                if q >= self.n_qubits {
                    return Err(Error::Invalid(format!("op {i}: qubit {q} out of range")));
                }
                if qs[..a].contains(&q) {
                    return Err(Error::Invalid(format!("op {i}: repeated operand {q}")));
                }
            }
            if let Some(MeasId(m)) = op.cond {
                if m >= self.n_measurements || !seen[m] {
                    return Err(Error::Invalid(format!("op {i}: condition on unrecorded measurement m{m}")));
                }
            }
            match op.gate {
                Gate::MeasureX(_, MeasId(m)) | Gate::MeasureZ(_, MeasId(m)) => {
                    if m >= self.n_measurements || seen[m] {
                        return Err(Error::Invalid(format!("op {i}: bad measurement id m{m}")));
                    }
                    if op.cond.is_some() {
                        return Err(Error::Invalid(format!("op {i}: conditioned measurement")));
                    }
                    seen[m] = true;
                }
                _ => {}
            }
        }
        for r in &self.registers {
            if r.qubits.iter().any(|&q| q >= self.n_qubits) {
                return Err(Error::Invalid(format!("register {} out of range", r.name)));
            }
        }
        Ok(())
    }

    /// Reversed circuit with inverted gates. Fails if measurements are present.
    pub fn inverse(&self) -> Result<Circuit> {
        let mut ops = Vec::with_capacity(self.ops.len());
        for op in self.ops.iter().rev() {
            if op.cond.is_some() {
                return Err(Error::Invalid("cannot invert a classically conditioned gate".into()));
            }
            let gate = op
                .gate
                .inverse()
                .ok_or_else(|| Error::Invalid("cannot invert a measurement".into()))?;
            ops.push(Op { gate, cond: None });
        }
        Ok(Circuit { ops, ..self.clone() })
    }

    /// Line-oriented text form: a register table followed by one gate per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "circuit v1");
        let _ = writeln!(s, "qubits {}", self.n_qubits);
        let _ = writeln!(s, "measurements {}", self.n_measurements);
        for r in &self.registers {
            let qs: Vec<String> = r.qubits.iter().map(|q| q.to_string()).collect();
            let _ = writeln!(s, "reg {} {} {}", r.name, r.role.as_str(), qs.join(" "));
        }
        let _ = writeln!(s, "gates {}", self.ops.len());
        for op in &self.ops {
            let mut line = op.gate.mnemonic().to_string();
            for q in op.gate.qubits() {
                let _ = write!(line, " {q}");
            }
            if let Gate::MeasureX(_, MeasId(m)) | Gate::MeasureZ(_, MeasId(m)) = op.gate {
                let _ = write!(line, " ->m{m}");
            }
            if let Some(MeasId(m)) = op.cond {
                let _ = write!(line, " @cond:m{m}");
            }
            s.push_str(line.trim_end());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (n, header) = lines.next().ok_or_else(|| err(1, "empty circuit text"))?;
        if header != "circuit v1" {
            return Err(err(n, "expected `circuit v1` header"));
        }
        let mut field = |key: &str| -> Result<usize> {
            let (n, l) = lines.next().ok_or_else(|| err(0, "truncated header"))?;
            l.strip_prefix(key)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| err(n, &format!("expected `{key} <count>`")))
        };
        let n_qubits = field("qubits")?;
        let n_measurements = field("measurements")?;
        let mut circuit = Circuit { n_qubits, registers: Vec::new(), ops: Vec::new(), n_measurements };
        let mut expected_gates = None;
        for (n, l) in lines {
            let mut tok = l.split_whitespace();
            let head = tok.next().unwrap_or_default();
            if expected_gates.is_none() {
                match head {
                    "reg" => {
                        let name = tok.next().ok_or_else(|| err(n, "register name missing"))?;
                        let role: Role = tok
                            .next()
                            .ok_or_else(|| err(n, "register role missing"))?
                            .parse()
                            .map_err(|_| err(n, "unknown register role"))?;
                        let qubits = tok
                            .map(|t| t.parse::<usize>().map_err(|_| err(n, "bad qubit index")))
                            .collect::<Result<Vec<_>>>()?;
                        circuit.registers.push(Register { name: name.to_string(), role, qubits });
                    }
                    "gates" => {
                        let count: usize =
                            tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| err(n, "bad gate count"))?;
                        expected_gates = Some(count);
                    }
                    _ => return Err(err(n, "expected `reg` or `gates` line")),
                }
                continue;
            }
            let mut qubits = Vec::new();
            let mut meas = None;
            let mut cond = None;
            for t in tok {
                if let Some(m) = t.strip_prefix("->m") {
                    meas = Some(MeasId(m.parse().map_err(|_| err(n, "bad measurement id"))?));
                } else if let Some(m) = t.strip_prefix("@cond:m") {
                    cond = Some(MeasId(m.parse().map_err(|_| err(n, "bad condition id"))?));
                } else {
                    qubits.push(t.parse::<usize>().map_err(|_| err(n, "bad qubit index"))?);
                }
            }
            let arity = |k: usize| -> Result<()> {
                if qubits.len() == k {
                    Ok(())
                } else {
                    Err(err(n, &format!("{head} expects {k} qubits")))
                }
            };
            let gate = match head {
                "X" | "Y" | "Z" | "H" | "S" | "SDG" => {
                    arity(1)?;
                    let q = qubits[0];
                    match head {
                        "X" => Gate::X(q),
                        "Y" => Gate::Y(q),
                        "Z" => Gate::Z(q),
                        "H" => Gate::H(q),
                        "S" => Gate::S(q),
                        _ => Gate::Sdg(q),
                    }
                }
                "CNOT" => {
                    arity(2)?;
                    Gate::Cnot(qubits[0], qubits[1])
                }
                "CZ" => {
                    arity(2)?;
                    Gate::Cz(qubits[0], qubits[1])
                }
                "TOFFOLI" => {
                    arity(3)?;
                    Gate::Toffoli(qubits[0], qubits[1], qubits[2])
                }
                "CSWAP" => {
                    arity(3)?;
                    Gate::Cswap(qubits[0], qubits[1], qubits[2])
                }
                "MZ" | "MX" => {
                    arity(1)?;
                    let m = meas.ok_or_else(|| err(n, "measurement without record id"))?;
                    if head == "MZ" {
                        Gate::MeasureZ(qubits[0], m)
                    } else {
                        Gate::MeasureX(qubits[0], m)
                    }
                }
                _ => return Err(err(n, &format!("unknown gate `{head}`"))),
            };
            circuit.ops.push(Op { gate, cond });
        }
        if expected_gates != Some(circuit.ops.len()) {
            return Err(err(0, "gate count does not match `gates` line"));
        }
        circuit.validate()?;
        Ok(circuit)
    }
}

/// Incremental circuit construction with an ancilla pool.
///
/// Released ancillas must be back in `|0>`; they are handed out again by
/// [`Builder::ancilla`], which keeps simulated widths small.
#[derive(Debug, Default)]
pub struct Builder {
    n_qubits: usize,
    registers: Vec<Register>,
    ops: Vec<Op>,
    n_measurements: usize,
    free: Vec<Qubit>,
    ancillas: Vec<Qubit>,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &str, role: Role, width: usize) -> Vec<Qubit> {
        let qubits: Vec<Qubit> = (self.n_qubits..self.n_qubits + width).collect();
        self.n_qubits += width;
        self.registers.push(Register { name: name.to_string(), role, qubits: qubits.clone() });
        qubits
    }

    pub fn qubit(&mut self, name: &str, role: Role) -> Qubit {
        self.register(name, role, 1)[0]
    }

    /// A clean workspace qubit, reused from the pool when possible.
    pub fn ancilla(&mut self) -> Qubit {
        if let Some(q) = self.free.pop() {
            return q;
        }
        let q = self.n_qubits;
        self.n_qubits += 1;
        self.ancillas.push(q);
        q
    }

    pub fn ancillas(&mut self, n: usize) -> Vec<Qubit> {
        (0..n).map(|_| self.ancilla()).collect()
    }

    /// Returns a qubit known to be `|0>` to the pool.
    pub fn release(&mut self, q: Qubit) {
        debug_assert!(!self.free.contains(&q));
        self.free.push(q);
    }

    pub fn release_all(&mut self, qs: &[Qubit]) {
        for &q in qs.iter().rev() {
            self.release(q);
        }
    }

    pub fn push(&mut self, gate: Gate) {
        self.ops.push(Op { gate, cond: None });
    }

    pub fn push_if(&mut self, gate: Gate, cond: MeasId) {
        self.ops.push(Op { gate, cond: Some(cond) });
    }

    pub fn extend(&mut self, ops: &[Op]) {
        self.ops.extend_from_slice(ops);
    }

    pub fn mark(&self) -> usize {
        self.ops.len()
    }

    /// Copy of the ops appended since `mark`.
    pub fn ops_since(&self, mark: usize) -> Vec<Op> {
        self.ops[mark..].to_vec()
    }

    /// Appends the inverse of a measurement-free op slice.
    pub fn push_inverse(&mut self, ops: &[Op]) {
        for op in ops.iter().rev() {
            assert!(op.cond.is_none(), "inverse of conditioned gate");
            let g = op.gate.inverse().expect("inverse of measurement");
            self.push(g);
        }
    }

    pub fn x(&mut self, q: Qubit) {
        self.push(Gate::X(q));
    }
    pub fn z(&mut self, q: Qubit) {
        self.push(Gate::Z(q));
    }
    pub fn h(&mut self, q: Qubit) {
        self.push(Gate::H(q));
    }
    pub fn s(&mut self, q: Qubit) {
        self.push(Gate::S(q));
    }
    pub fn sdg(&mut self, q: Qubit) {
        self.push(Gate::Sdg(q));
    }
    pub fn cnot(&mut self, c: Qubit, t: Qubit) {
        self.push(Gate::Cnot(c, t));
    }
    pub fn cz(&mut self, a: Qubit, b: Qubit) {
        self.push(Gate::Cz(a, b));
    }
    pub fn toffoli(&mut self, a: Qubit, b: Qubit, t: Qubit) {
        self.push(Gate::Toffoli(a, b, t));
    }
    pub fn cswap(&mut self, c: Qubit, a: Qubit, b: Qubit) {
        self.push(Gate::Cswap(c, a, b));
    }

    /// Controlled-Y as `S† · CNOT · S` on the target.
    pub fn cy(&mut self, c: Qubit, t: Qubit) {
        self.sdg(t);
        self.cnot(c, t);
        self.s(t);
    }

    pub fn measure_x(&mut self, q: Qubit) -> MeasId {
        let m = MeasId(self.n_measurements);
        self.n_measurements += 1;
        self.push(Gate::MeasureX(q, m));
        m
    }

    pub fn measure_z(&mut self, q: Qubit) -> MeasId {
        let m = MeasId(self.n_measurements);
        self.n_measurements += 1;
        self.push(Gate::MeasureZ(q, m));
        m
    }

    /// Returns an X-measured qubit (left in `|±>`) to `|0>`.
    pub fn reset_after_mx(&mut self, q: Qubit, m: MeasId) {
        self.h(q);
        self.push_if(Gate::X(q), m);
    }

    /// Computes `a ∧ b` into a fresh ancilla (one Toffoli).
    pub fn and(&mut self, a: Qubit, b: Qubit) -> Qubit {
        let t = self.ancilla();
        self.toffoli(a, b, t);
        t
    }

    /// Erases `t = a ∧ b` by X measurement and a conditioned CZ; no Toffoli.
    pub fn unand(&mut self, a: Qubit, b: Qubit, t: Qubit) {
        let m = self.measure_x(t);
        self.push_if(Gate::Cz(a, b), m);
        self.reset_after_mx(t, m);
        self.release(t);
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_measurements(&self) -> usize {
        self.n_measurements
    }

    pub fn toffoli_count(&self) -> usize {
        self.ops.iter().filter(|op| op.gate.is_toffoli_class()).count()
    }

    pub fn finish(mut self) -> Circuit {
        if !self.ancillas.is_empty() {
            let qubits = std::mem::take(&mut self.ancillas);
            self.registers.push(Register { name: "ancilla".into(), role: Role::Workspace, qubits });
        }
        Circuit {
            n_qubits: self.n_qubits,
            registers: self.registers,
            ops: self.ops,
            n_measurements: self.n_measurements,
        }
    }
}

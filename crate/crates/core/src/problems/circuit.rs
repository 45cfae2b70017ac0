use crate::error::{Error, Result};
use crate::machine::SelfReducible;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateOp {
    And,
    Or,
    Not,
}

/// A gate over earlier wires. Wires `0..num_inputs` are the inputs, and gate
/// `j` drives wire `num_inputs + j`. `b` is ignored for `Not`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gate {
    pub op: GateOp,
    pub a: usize,
    pub b: usize,
}

/// A boolean circuit in topological order, possibly with NOT gates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_inputs: usize,
    gates: Vec<Gate>,
    output: usize,
}

impl Circuit {
    pub fn new(num_inputs: usize, gates: Vec<Gate>, output: usize) -> Result<Self> {
        for (j, g) in gates.iter().enumerate() {
            let wire = num_inputs + j;
            let uses_b = g.op != GateOp::Not;
            if g.a >= wire || (uses_b && g.b >= wire) {
                return Err(Error::MalformedInstance(format!(
                    "gate {j} reads a wire that is not defined before it"
                )));
            }
        }
        if output >= num_inputs + gates.len() {
            return Err(Error::MalformedInstance(format!(
                "output wire {output} does not exist"
            )));
        }
        Ok(Self {
            num_inputs,
            gates,
            output,
        })
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn is_monotone(&self) -> bool {
        self.gates.iter().all(|g| g.op != GateOp::Not)
    }

    /// Evaluates with `inputs[i]` on input wire `i`.
    pub fn eval(&self, inputs: &[bool]) -> bool {
        let mut wires = Vec::with_capacity(self.num_inputs + self.gates.len());
        wires.extend_from_slice(&inputs[..self.num_inputs]);
        for g in &self.gates {
            let v = match g.op {
                GateOp::And => wires[g.a] && wires[g.b],
                GateOp::Or => wires[g.a] || wires[g.b],
                GateOp::Not => !wires[g.a],
            };
            wires.push(v);
        }
        wires[self.output]
    }
}

/// A circuit of AND and OR gates only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneCircuit(Circuit);

impl MonotoneCircuit {
    pub fn new(num_inputs: usize, gates: Vec<Gate>, output: usize) -> Result<Self> {
        let c = Circuit::new(num_inputs, gates, output)?;
        if !c.is_monotone() {
            return Err(Error::MalformedInstance(
                "monotone circuits may not contain NOT gates".into(),
            ));
        }
        Ok(Self(c))
    }

    /// Accepts `c` only if it has no NOT gates.
    pub fn from_circuit(c: Circuit) -> Result<Self> {
        if c.is_monotone() {
            Ok(Self(c))
        } else {
            Err(Error::UnsupportedFamily(
                "circuit contains NOT gates; only monotone circuits are supported".into(),
            ))
        }
    }

    pub fn circuit(&self) -> &Circuit {
        &self.0
    }

    pub fn num_inputs(&self) -> usize {
        self.0.num_inputs
    }

    pub fn eval(&self, inputs: &[bool]) -> bool {
        self.0.eval(inputs)
    }
}

/// Counting satisfying assignments of a monotone circuit, splitting on the
/// inputs in order. Unassigned inputs are held at 1, which is the most
/// favourable completion of a monotone function, so evaluating the circuit
/// decides satisfiability exactly.
#[derive(Debug, Clone)]
pub struct MonotoneCount {
    circuit: MonotoneCircuit,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonotoneState {
    next_input: usize,
    inputs: Vec<bool>,
}

pub fn monotone_instance(c: &MonotoneCircuit) -> MonotoneCount {
    MonotoneCount { circuit: c.clone() }
}

impl SelfReducible for MonotoneCount {
    type State = MonotoneState;

    fn initial(&self) -> MonotoneState {
        MonotoneState {
            next_input: 0,
            inputs: vec![true; self.circuit.num_inputs()],
        }
    }

    fn decide(&self, s: &MonotoneState) -> bool {
        self.circuit.eval(&s.inputs)
    }

    fn split(&self, s: &MonotoneState) -> Option<(MonotoneState, MonotoneState)> {
        if s.next_input == self.circuit.num_inputs() {
            return None;
        }
        let mut zero = s.clone();
        zero.inputs[s.next_input] = false;
        zero.next_input += 1;
        let mut one = s.clone();
        one.next_input += 1;
        Some((zero, one))
    }

    fn num_vars(&self) -> usize {
        self.circuit.num_inputs()
    }
}

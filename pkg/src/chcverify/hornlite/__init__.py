"""A small reference Horn solver for SMT-LIB2 HORN scripts.

Self-contained on purpose: it parses the exchange format with its own
reader (so it doubles as an independent well-formedness check of emitted
files) and decides CHC satisfiability over linear integer arithmetic:

- unsatisfiability by bounded clause unfolding down to an integer-feasible
  derivation of false;
- satisfiability by synthesizing a conjunctive inductive model from
  sampled reachable states (affine hull, difference bounds and guarded
  implications), filtered to an inductive fixpoint.

It speaks the plain solver protocol: invoked with a script path, answers
sat/unsat/unknown on stdout, and prints the model after sat.
"""

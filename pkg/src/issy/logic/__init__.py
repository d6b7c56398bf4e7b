"""RP-LTL formulas, atom abstraction and automaton import."""

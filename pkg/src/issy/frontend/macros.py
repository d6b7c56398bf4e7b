"""Macro expansion over the surface AST.

Macros are plain tree substitution. A definition may only use macros defined
before it, so expansion in definition order never loops. Blocks may use any
macro of the file.
"""

from __future__ import annotations

from dataclasses import replace

from .syntax import (Diagnostic, FBinary, FIdent, FormulaBlockSyntax, FPred, FUnary, GameBlockSyntax,
                     LocDefSyntax, MacroDefSyntax, PBinary, PIdent, PUnary, SourceSpec, TransDefSyntax,
                     VarDeclSyntax, error)


class _MacroError(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


class _Expander:
    def __init__(self, variables: set[str], later: set[str]):
        self.variables = variables
        self.defs: dict = {}  # name -> expanded body
        self.later = later  # macro names not yet usable (for definition bodies)

    def formula(self, f):
        if isinstance(f, FIdent):
            body = self._lookup(f.name, f.span)
            if body is None:
                return f
            if f.primed:
                raise _MacroError(error("PRIMED_MACRO", f"macro '{f.name}' cannot be primed", f.span))
            return body
        if isinstance(f, FPred):
            return replace(f, pred=self.pred(f.pred))
        if isinstance(f, FUnary):
            return replace(f, arg=self.formula(f.arg))
        if isinstance(f, FBinary):
            return replace(f, left=self.formula(f.left), right=self.formula(f.right))
        return f

    def pred(self, p):
        if isinstance(p, PIdent):
            body = self._lookup(p.name, p.span)
            if body is None:
                return p
            if p.primed:
                raise _MacroError(error("PRIMED_MACRO", f"macro '{p.name}' cannot be primed", p.span))
            if not isinstance(body, FPred):
                raise _MacroError(error("MACRO_IN_PRED_NOT_ATOMIC",
                                        f"macro '{p.name}' is used inside [...] but is not a single [predicate]",
                                        p.span))
            return body.pred
        if isinstance(p, PUnary):
            return replace(p, arg=self.pred(p.arg))
        if isinstance(p, PBinary):
            return replace(p, left=self.pred(p.left), right=self.pred(p.right))
        return p

    def _lookup(self, name, span):
        if name in self.defs:
            return self.defs[name]
        if name in self.later:
            raise _MacroError(error("CYCLIC_MACRO",
                                    f"macro '{name}' is used before its definition is complete", span))
        if name in self.variables:
            return None
        raise _MacroError(error("UNDEFINED_MACRO", f"'{name}' is neither a declared variable nor a macro", span))


def expand_macros(ast: SourceSpec):
    """Inline every macro reference and drop the definitions.

    Returns the expanded SourceSpec or a list of error Diagnostics."""
    variables = {d.name for d in ast.vardecls}
    macros = ast.macros
    diags: list[Diagnostic] = []
    seen: dict[str, MacroDefSyntax] = {}
    for m in macros:
        if m.name in seen:
            diags.append(error("DUPLICATE_MACRO", f"macro '{m.name}' is defined twice", m.span))
        elif m.name in variables:
            diags.append(error("DUPLICATE_MACRO", f"macro '{m.name}' clashes with a variable of the same name",
                               m.span))
        seen.setdefault(m.name, m)
    if diags:
        return diags

    # definitions see only earlier macros
    ex = _Expander(variables, {m.name for m in macros})
    for m in macros:
        # m itself is still in ex.later, so self reference is a cycle too
        try:
            body = ex.formula(m.body)
        except _MacroError as e:
            diags.append(e.diag)
            body = m.body
        ex.later.discard(m.name)
        ex.defs[m.name] = body
    if diags:
        return diags

    out = []
    for item in ast.items:
        try:
            if isinstance(item, MacroDefSyntax):
                continue
            if isinstance(item, VarDeclSyntax):
                out.append(item)
            elif isinstance(item, FormulaBlockSyntax):
                stmts = tuple(replace(s, formula=ex.formula(s.formula)) for s in item.stmts)
                out.append(replace(item, stmts=stmts))
            elif isinstance(item, GameBlockSyntax):
                body = []
                for x in item.body:
                    if isinstance(x, LocDefSyntax):
                        body.append(x if x.domain is None else replace(x, domain=ex.formula(x.domain)))
                    elif isinstance(x, TransDefSyntax):
                        body.append(replace(x, guard=ex.formula(x.guard)))
                out.append(replace(item, body=tuple(body)))
        except _MacroError as e:
            diags.append(e.diag)
    if diags:
        return diags
    return SourceSpec(tuple(out))

"""External LTL-to-automaton translator.

The command is taken from the argument, ``ISSY_LTL_CMD``, or a default Spot
invocation. If the command contains ``{formula}`` the formula is substituted
there as one argument; otherwise it is written to stdin.
"""

from __future__ import annotations

import os
import shlex
import subprocess
from dataclasses import dataclass

from ..errors import TranslatorError

DEFAULT_LTL_COMMAND = "ltl2tgba --deterministic --complete --hoaf=v1 '--parity=max odd' -F -"


def translator_command(command: str | None = None) -> str:
    return command or os.environ.get("ISSY_LTL_CMD") or DEFAULT_LTL_COMMAND


@dataclass
class LtlTranslator:
    command: str | None = None
    timeout: float = 600.0

    def argv(self, ltl: str) -> tuple[list[str], str | None]:
        cmd = translator_command(self.command)
        if "{formula}" in cmd:
            return [part.replace("{formula}", ltl) for part in shlex.split(cmd)], None
        return shlex.split(cmd), ltl + "\n"

    def available(self) -> bool:
        import shutil
        argv, _ = self.argv("1")
        return bool(argv) and shutil.which(argv[0]) is not None

    def translate(self, ltl: str) -> str:
        if not ltl.strip():
            raise TranslatorError(None, "empty formula")
        argv, stdin = self.argv(ltl)
        try:
            proc = subprocess.run(argv, input=stdin, capture_output=True, text=True, timeout=self.timeout)
        except FileNotFoundError as e:
            raise TranslatorError(127, f"translator not found: {e}") from e
        except subprocess.TimeoutExpired:
            raise TranslatorError(None, f"translator timed out after {self.timeout}s") from None
        if proc.returncode != 0:
            raise TranslatorError(proc.returncode, proc.stderr)
        if "--BODY--" not in proc.stdout:
            raise TranslatorError(proc.returncode, "translator produced no automaton: " + proc.stderr)
        return proc.stdout


def translate_ltl(ltl: str, command: str | None = None) -> str:
    """Propositional LTL text to HOA text via the external translator."""
    return LtlTranslator(command).translate(ltl)

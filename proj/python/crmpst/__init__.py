"""Multiparty session types with crash-stop failures.

Thin wrapper around the native module: parse and project protocols, verify
safety / deadlock-freedom / liveness / correspondence, and interpret process
scripts under crash schedules.
"""

from _crmpst import check, project, render_removed, run, typecheck, verify

__all__ = ["check", "project", "render_removed", "run", "typecheck", "verify"]

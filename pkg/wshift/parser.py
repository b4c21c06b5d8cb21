from __future__ import annotations

import importlib.util
import re
import sys
from argparse import (
    SUPPRESS,
    Action,
    ArgumentParser as APArgumentParser,
    HelpFormatter,
    Namespace,
    _SubParsersAction,
)
from gettext import gettext as _
from os import PathLike
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Tuple

from simpleconf import Config

from . import type_


class DefaultsHelpFormatter(HelpFormatter):
    """Append "[default: ...]" to option help and list commands flat"""

    def _format_action(self, action: Action) -> str:
        if isinstance(action, _SubParsersAction):
            parts = [
                super(DefaultsHelpFormatter, self)._format_action(subaction)
                for subaction in self._iter_indented_subactions(action)
            ]
            return self._join_parts(parts)
        return super()._format_action(action)

    def add_arguments(self, actions: Iterable[Action]) -> None:
        for action in actions:
            if (
                action.help is not SUPPRESS
                and action.default is not None
                and action.default is not SUPPRESS
                and not re.search(r"\[(?:no)?default: ", action.help or "")
            ):
                help = action.help or ""
                sep = " " if help else ""
                action.help = f"{help}{sep}[default: %(default)s]"
            self.add_argument(action)


def import_pyfile(pyfile: PathLike | str) -> dict:
    """Import a python file and return its `args` dictionary"""
    spec = importlib.util.spec_from_file_location("config", pyfile)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    try:
        return module.args
    except AttributeError:
        raise AttributeError("No `args` variables found") from None


class ArgumentParser(APArgumentParser):
    """ArgumentParser with commands, @file defaults and domain types

    `@file.txt` arguments are expanded into argv; any other `@file`
    (toml, json, yaml, py) provides default values, where a section named
    after a command holds that command's defaults.
    """

    def __init__(
        self,
        *args: Any,
        fromfile_prefix_chars: str | None = "@",
        formatter_class: type = DefaultsHelpFormatter,
        exit_on_void: bool = False,
        **kwargs: Any,
    ) -> None:
        """Create an ArgumentParser

        Args:
            *args: Passed to argparse.ArgumentParser
            fromfile_prefix_chars: The prefix characters for argument and
                default files
            formatter_class: The help formatter class
            exit_on_void: Whether to exit when no arguments are given
            **kwargs: Passed to argparse.ArgumentParser
        """
        super().__init__(
            *args,
            fromfile_prefix_chars=fromfile_prefix_chars,
            formatter_class=formatter_class,
            **kwargs,
        )
        self.exit_on_void = exit_on_void
        self.level = 0
        self._commands: _SubParsersAction | None = None

        self.register("type", "p", type_.p_value)
        self.register("type", "tol", type_.tolerance)
        self.register("type", "family", type_.family)
        self.register("type", "rho", type_.rho)
        self.register("type", "posint", type_.positive_int)
        self.register("type", "nonneg", type_.nonnegative_int)
        self.register("type", "posfloat", type_.positive_float)
        self.register("type", "path", Path)

    def add_command(self, name: str, **kwargs: Any) -> ArgumentParser:
        """Add a sub-command, creating the (required) subparsers on demand

        Args:
            name: The name of the command
            **kwargs: Passed to add_parser()

        Returns:
            The parser of the command
        """
        if self._commands is None:
            self._commands = self.add_subparsers(
                title=_("commands"),
                required=True,
                dest="COMMAND" if self.level == 0 else f"COMMAND{self.level + 1}",
            )
        kwargs.setdefault("help", f"The {name} command")
        kwargs.setdefault("formatter_class", self.formatter_class)
        command = self._commands.add_parser(name, **kwargs)
        command.level = self.level + 1
        return command

    def parse_known_args(  # type: ignore[override]
        self,
        args: Sequence[str] | None = None,
        namespace: Namespace | None = None,
    ) -> Tuple[Namespace, List[str]]:
        """Parse known arguments, loading defaults from @file first"""
        args = sys.argv[1:] if args is None else list(args)

        new_args = []
        for arg in args:
            if (
                not self.fromfile_prefix_chars
                or not arg
                or arg[0] not in self.fromfile_prefix_chars
                or arg.endswith(".txt")
            ):
                new_args.append(arg)
                continue

            conf: dict | str = arg[1:]
            try:
                if conf.endswith(".py"):
                    conf = import_pyfile(conf)
                self.set_defaults_from_configs(conf)
            except Exception as exc:
                self.error(f"Cannot load defaults from [{arg[1:]}]: {exc}")

        parsed, argv = super().parse_known_args(new_args, namespace)
        if not argv and not args and self.exit_on_void:
            self.error("No arguments provided")
        return parsed, argv

    def set_defaults_from_configs(self, *configs: dict | str) -> None:
        """Set default values from configs (dicts or files)

        Keys may use dashes or underscores. Required arguments given a
        default become optional. Numbers are passed through the argument's
        type like command line values (so `tol = 1e-8` is a magnitude).
        """
        conf = Config.load(*configs)
        conf = {str(key).replace("-", "_"): value for key, value in conf.items()}
        for action in self._actions:
            if action.dest in conf:
                value = conf[action.dest]
                if (
                    action.type is not None
                    and isinstance(value, (int, float))
                    and not isinstance(value, bool)
                ):
                    value = str(value)
                action.default = value
                action.required = False
            if isinstance(action, _SubParsersAction):
                for name, command in action._name_parser_map.items():
                    if name in conf:
                        command.set_defaults_from_configs(conf[name])

"""
Bootstrap of the rendered interpreters.

Rendering and compiling happens once per (library, variant) and is cached;
every rendered namespace records the semantics hash it came from.
"""

import logging
from typing import Callable, Optional

from extractor.library import TemplateLibrary, check_semantics_hashes, default_library
from extractor.render import (STEP_FUNCTION, SWITCH_LOOP, THREADED_FACTORIES, render_step, render_switch_loop,
                              render_threaded)
from vm.runtime import exec_generated

logger = logging.getLogger(__name__)


class Interpreters:
    def __init__(self, library: TemplateLibrary):
        self.library = library
        self.sources: dict[str, str] = {}
        self._namespaces: dict[str, dict] = {}

    def _namespace(self, key: str, render: Callable[[], str]) -> dict:
        namespace = self._namespaces.get(key)
        if namespace is None:
            source = render()
            self.sources[key] = source
            namespace = exec_generated(source, f"<qjit:{key}>")
            self._namespaces[key] = namespace
            logger.debug("Rendered %s (%d lines)", key, source.count("\n"))
        return namespace

    def switch_loop(self, counting: bool = False, hooked: bool = False) -> Callable:
        key = f"switch{'-counting' if counting else ''}{'-hooked' if hooked else ''}"
        return self._namespace(key, lambda: render_switch_loop(self.library, counting, hooked))[SWITCH_LOOP]

    def step_function(self) -> Callable:
        return self._namespace("step", lambda: render_step(self.library))[STEP_FUNCTION]

    def threaded_factories(self, counting: bool = False) -> dict[int, Callable]:
        key = f"threaded{'-counting' if counting else ''}"
        return self._namespace(key, lambda: render_threaded(self.library, counting))[THREADED_FACTORIES]

    def semantics_hashes(self) -> dict[str, str]:
        recorded = {"templates": self.library.semantics_sha256}
        recorded.update({key: namespace["SEMANTICS_SHA256"] for key, namespace in self._namespaces.items()})
        return recorded

    def check(self) -> str:
        return check_semantics_hashes(self.semantics_hashes())


_CACHE: dict[int, Interpreters] = {}


def get_interpreters(library: Optional[TemplateLibrary] = None) -> Interpreters:
    library = library or default_library()
    interpreters = _CACHE.get(id(library))
    if interpreters is None or interpreters.library is not library:
        interpreters = Interpreters(library)
        _CACHE[id(library)] = interpreters
    return interpreters

"""The serve endpoints: spec retrieval, query instantiation, error paths."""

from __future__ import annotations

import json
import sys
import threading
import urllib.error
import urllib.request

import pytest

from precis.generator import greedy_optimize, group_transformations
from precis.interface import populate_widgets
from precis.miner import MiningConfig, mine
from precis.server import Backend, make_server
from precis.sqlparser import parse_query
from precis.widgets import CostModel, default_library, make_widget

from conftest import Q1, Q2, Q4
from test_miner import FIG_LIBRARY, make_log


def build_fig_spec(library=None):
    graph = mine(make_log([Q1, Q2, "SELECT TOP 5 * FROM Sales", Q4]),
                 FIG_LIBRARY, MiningConfig("all"))
    groups = group_transformations(graph)
    mapping = greedy_optimize(graph, groups, library or default_library(),
                              CostModel(s_max=10))
    return populate_widgets(mapping, graph)


@pytest.fixture()
def server_url():
    spec = build_fig_spec()
    server = make_server(spec, 0, Backend("echo"))
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://localhost:{server.server_address[1]}", spec
    server.shutdown()
    server.server_close()


def get_json(url: str):
    with urllib.request.urlopen(url, timeout=10) as response:
        return json.loads(response.read())


def post_json(url: str, payload: dict):
    request = urllib.request.Request(
        url, data=json.dumps(payload).encode(),
        headers={"Content-Type": "application/json"}, method="POST")
    with urllib.request.urlopen(request, timeout=10) as response:
        return response.status, json.loads(response.read())


def post_expect_error(url: str, payload: dict):
    try:
        post_json(url, payload)
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read())
    raise AssertionError("expected an HTTP error")


class TestServe:
    def test_get_interface(self, server_url):
        url, spec = server_url
        assert get_json(f"{url}/interface") == spec.to_jsonable()

    def test_query_substitutes_dropdown(self, server_url):
        url, _ = server_url
        status, body = post_json(f"{url}/query",
                                 {"panel": 0, "slot_values": {"country": "UK"}})
        assert status == 200
        assert body == {"sql": Q2}  # echo backend: no rows field

    def test_query_toggles_checkbox(self, server_url):
        url, _ = server_url
        status, body = post_json(f"{url}/query",
                                 {"panel": 1, "slot_values": {"top_5": False}})
        assert status == 200 and body["sql"] == Q4

    def test_query_defaults_to_current(self, server_url):
        url, spec = server_url
        status, body = post_json(f"{url}/query", {"panel": 0, "slot_values": {}})
        assert status == 200 and body["sql"] == spec.panels[0].base_sql

    def test_out_of_domain_value_is_400(self, server_url):
        url, _ = server_url
        code, body = post_expect_error(f"{url}/query",
                                       {"panel": 0, "slot_values": {"country": "FR"}})
        assert code == 400 and body["field"] == "country"

    def test_unknown_slot_and_panel(self, server_url):
        url, _ = server_url
        code, body = post_expect_error(f"{url}/query",
                                       {"panel": 0, "slot_values": {"bogus": "x"}})
        assert code == 400 and body["field"] == "bogus"
        code, body = post_expect_error(f"{url}/query",
                                       {"panel": 99, "slot_values": {}})
        assert code == 400 and body["field"] == "panel"

    def test_response_sql_reparses_and_is_covered(self, server_url):
        from precis.ast import SourceQuery
        from precis.interface import coverage

        url, spec = server_url
        for value in ("US", "UK"):
            _, body = post_json(f"{url}/query",
                                {"panel": 0, "slot_values": {"country": value}})
            ast = parse_query(body["sql"])
            result = coverage(spec, [(SourceQuery(body["sql"], 0), ast)])
            assert result.covered == 1


class TestBackends:
    def _serve(self, backend, permissive=False, library=None):
        spec = build_fig_spec(library)
        server = make_server(spec, 0, backend, permissive=permissive)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        return server, f"http://localhost:{server.server_address[1]}"

    def test_command_backend_returns_rows(self):
        command = (f"{sys.executable} -c \"import sys,json; "
                   f"sql=sys.stdin.read(); print(json.dumps([{{'echo': sql.strip()}}]))\"")
        server, url = self._serve(Backend("command", command))
        try:
            status, body = post_json(f"{url}/query", {"panel": 0, "slot_values": {}})
            assert status == 200
            assert body["rows"] == [{"echo": Q1}]
        finally:
            server.shutdown()
            server.server_close()

    def test_failing_backend_is_502(self):
        command = f"{sys.executable} -c \"import sys; sys.exit(3)\""
        server, url = self._serve(Backend("command", command))
        try:
            code, body = post_expect_error(f"{url}/query", {"panel": 0, "slot_values": {}})
            assert code == 502 and "exited 3" in body["error"]
        finally:
            server.shutdown()
            server.server_close()

    def test_permissive_relaxes_textbox_only(self):
        textbox_only = (make_widget("textbox"), make_widget("checkbox"))
        server, url = self._serve(Backend("echo"), permissive=True,
                                  library=textbox_only)
        try:
            status, body = post_json(f"{url}/query",
                                     {"panel": 0, "slot_values": {"country": "anything at all"}})
            assert status == 200
            assert body["sql"] == "SELECT * FROM Sales WHERE Country = 'anything at all'"
            code, body = post_expect_error(f"{url}/query",
                                           {"panel": 1, "slot_values": {"top_5": "yes"}})
            assert code == 400  # checkbox domains stay strict
        finally:
            server.shutdown()
            server.server_close()

        strict_server, url = self._serve(Backend("echo"), permissive=False,
                                         library=textbox_only)
        try:
            code, body = post_expect_error(f"{url}/query",
                                           {"panel": 0, "slot_values": {"country": "it's"}})
            assert code == 400 and body["field"] == "country"
        finally:
            strict_server.shutdown()
            strict_server.server_close()

    def test_backend_parse(self):
        assert Backend.parse("echo").mode == "echo"
        assert Backend.parse("command:cat").command == "cat"
        with pytest.raises(ValueError):
            Backend.parse("mystery")

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from ivrflow.config import EngineConfig, load_config
from ivrflow.nlu import IntentClass, IntentTaxonomy, KnowledgeDoc, KnowledgeStore
from ivrflow.session import RoutingTable

TOY_CLASSES = [
    IntentClass("card_lost", {"kk": "карта жоғалды", "ru": "утеря карты"}, "Q17", ["картамды", "жоғалттым"]),
    IntentClass("loan_info", {"kk": "несие туралы", "ru": "кредит"}, "Q03", ["несие", "пайыз"]),
    IntentClass("balance", {"kk": "шот қалдығы", "ru": "баланс"}, "Q05", ["қалдық", "шот", "баланс"]),
]


@pytest.fixture
def toy_taxonomy():
    return IntentTaxonomy.from_classes(TOY_CLASSES)


@pytest.fixture
def toy_store():
    return KnowledgeStore([
        KnowledgeDoc("d1", "Картамды жоғалттым десеңіз, картаны бірден бұғаттаймыз", "card_lost"),
        KnowledgeDoc("d2", "Несие пайызы жылына 18 пайыз", "loan_info"),
        KnowledgeDoc("d3", "Шот қалдығын қосымшадан көруге болады", "balance"),
    ])


@pytest.fixture
def toy_config(toy_taxonomy, toy_store):
    return EngineConfig(
        taxonomy=toy_taxonomy,
        routing=RoutingTable.from_taxonomy(toy_taxonomy, operator_queue="OPERATOR"),
        store=toy_store,
    )


@pytest.fixture(scope="session")
def default_config():
    return load_config()


class StubServer:
    """Tiny HTTP server answering POSTs from a ``{path: handler}`` table.

    A handler gets the decoded JSON body and returns ``(status, obj)``; it may
    sleep to simulate a slow backend.
    """

    def __init__(self):
        self.routes = {}
        self.requests = []
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length).decode("utf-8"))
                stub.requests.append((self.path, body))
                handler = stub.routes.get(self.path)
                if handler is None:
                    status, obj = 404, {"error": "no route"}
                else:
                    status, obj = handler(body)
                data = obj if isinstance(obj, bytes) else json.dumps(obj, ensure_ascii=False).encode("utf-8")
                try:
                    self.send_response(status)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(data)))
                    self.end_headers()
                    self.wfile.write(data)
                except (BrokenPipeError, ConnectionResetError):
                    pass

            def log_message(self, *args):
                pass

        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.httpd.daemon_threads = True
        self.url = f"http://127.0.0.1:{self.httpd.server_address[1]}"
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self.thread.start()

    def close(self):
        self.httpd.shutdown()
        self.httpd.server_close()


@pytest.fixture
def stub_server():
    server = StubServer()
    yield server
    server.close()


def slow(seconds, reply):
    def handler(body):
        time.sleep(seconds)
        return reply
    return handler


# --- acceptance reporting ----------------------------------------------------------

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    entry = _ACCEPTANCE.setdefault(item.nodeid, {"marker": marker.args, "ok": True, "detail": ""})
    if call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception):
        entry["ok"] = False
        entry["error"] = call.excinfo.exconly().splitlines()[0][:160]
    for key, value in item.user_properties:
        if key == "detail":
            entry["detail"] = value


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for entry in sorted(_ACCEPTANCE.values(), key=lambda e: e["marker"][0]):
        number, title = entry["marker"]
        status = "PASS" if entry["ok"] else "FAIL"
        detail = entry["detail"] or entry.get("error", "")
        if not entry["ok"] and entry["detail"] and "error" in entry:
            detail += f" | {entry['error']}"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}: {detail}")

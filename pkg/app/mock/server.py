import logging
import socket
import threading
import time

import uvicorn
from fastapi import FastAPI

logger = logging.getLogger(__name__)


class MockServer:
    """Runs a FastAPI app with uvicorn in a background thread on an ephemeral local port.

    Usage::

        with MockServer(create_app(engine, reader)) as server:
            SearchClient(f"{server.url}/search").search("paris", 3)
    """

    def __init__(self, app: FastAPI, host: str = "127.0.0.1", startup_timeout: float = 10.0):
        self.app = app
        self.host = host
        self.startup_timeout = startup_timeout
        self.port = 0
        self._server = None
        self._thread = None
        self._socket = None

    @property
    def url(self) -> str:
        return f"http://{self.host}:{self.port}"

    def start(self) -> "MockServer":
        self._socket = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._socket.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._socket.bind((self.host, 0))
        self.port = self._socket.getsockname()[1]

        config = uvicorn.Config(self.app, log_level="warning", lifespan="on")
        self._server = uvicorn.Server(config)
        self._thread = threading.Thread(
            target=self._server.run, kwargs={"sockets": [self._socket]}, daemon=True
        )
        self._thread.start()

        deadline = time.monotonic() + self.startup_timeout
        while not self._server.started:
            if not self._thread.is_alive() or time.monotonic() > deadline:
                raise RuntimeError(f"mock server failed to start on {self.url}")
            time.sleep(0.01)
        logger.info(f"Mock server listening on {self.url}")
        return self

    def stop(self) -> None:
        if self._server is not None:
            self._server.should_exit = True
            self._thread.join(timeout=self.startup_timeout)
        if self._socket is not None:
            self._socket.close()
        logger.info(f"Mock server on {self.url} stopped")

    def __enter__(self) -> "MockServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()

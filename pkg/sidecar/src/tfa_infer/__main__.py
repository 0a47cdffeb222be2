"""Run the sidecar: ``python -m tfa_infer`` or the tfa-infer-service script."""

import uvicorn

from tfa_infer.app import create_app
from tfa_infer.config import Settings


def main() -> None:
    settings = Settings.from_env()
    uvicorn.run(create_app(settings=settings), host=settings.host, port=settings.port)


if __name__ == "__main__":
    main()

import os
from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict

current_directory = os.path.dirname(os.path.abspath(__file__))
env_file_path = os.path.join(current_directory, "..", ".env")


class Settings(BaseSettings):
    app_name: str = "rekernel"

    model_config = SettingsConfigDict(env_file=env_file_path, env_prefix="REK_", extra="ignore")

    frac_bits: int = 20
    entropy: Literal["os", "seeded"] = "os"

    host: str = "127.0.0.1"
    alice_port: int = 47001
    bob_port: int = 47002
    server_port: int = 47003

    timeout_secs: float = 30.0
    max_payload_len: int = 2**32

    log_level: str = "INFO"


settings = Settings()

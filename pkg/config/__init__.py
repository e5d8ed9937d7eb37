from config.settings import Config, get_settings, reset_settings
from config.logging_config import setup_logging

__all__ = ["Config", "get_settings", "reset_settings", "setup_logging"]

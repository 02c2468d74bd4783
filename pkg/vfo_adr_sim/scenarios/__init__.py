from .loader import list_bundled_scenarios, load_config_text, parse_config

__all__ = ["parse_config", "load_config_text", "list_bundled_scenarios"]

import os
import json
import logging
from pathlib import Path
from typing import List
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)

ALL_SUITES = ['prop11', 'def21', 'prop24', 'prop25', 'prop45', 'universality']


@dataclass
class Config:
    """
    Run configuration with defaults.
    Values can be overridden via environment variables or config file.
    """

    # Determinism
    seed: int = field(default_factory=lambda: int(os.getenv('SEED', '20240601')))

    # Enumeration budgets
    cover_budget: int = field(default_factory=lambda: int(os.getenv('COVER_BUDGET', '12')))
    max_hom_size: int = field(default_factory=lambda: int(os.getenv('MAX_HOM_SIZE', '8')))
    max_enum_opens: int = field(default_factory=lambda: int(os.getenv('MAX_ENUM_OPENS', '6')))
    enum_node_budget: int = field(default_factory=lambda: int(os.getenv('ENUM_NODE_BUDGET', '200000')))
    category_budget: int = field(default_factory=lambda: int(os.getenv('CATEGORY_CHECK_BUDGET', '2000000')))

    # Corpus sizes
    max_points: int = field(default_factory=lambda: int(os.getenv('MAX_POINTS', '4')))
    exhaustive_max_points: int = field(default_factory=lambda: int(os.getenv('EXHAUSTIVE_MAX_POINTS', '3')))
    exhaustive_max_arrows: int = field(default_factory=lambda: int(os.getenv('EXHAUSTIVE_MAX_ARROWS', '9')))
    random_groupoids: int = field(default_factory=lambda: int(os.getenv('RANDOM_GROUPOIDS', '200')))
    random_max_arrows: int = field(default_factory=lambda: int(os.getenv('RANDOM_MAX_ARROWS', '12')))
    random_presheaves: int = field(default_factory=lambda: int(os.getenv('RANDOM_PRESHEAVES', '100')))

    # Output
    report_dir: str = field(default_factory=lambda: os.getenv('REPORT_DIR', './data/reports'))
    workers: int = field(default_factory=lambda: int(os.getenv('WORKERS', '1')))

    # Suites run by `corpus` and accepted by `check`
    enabled_suites: List[str] = field(default_factory=lambda: _parse_list_env('ENABLED_SUITES', list(ALL_SUITES)))

    def __post_init__(self):
        """Post-initialization processing."""
        config_file = Path('./config.json')
        if config_file.exists():
            self._load_from_file(config_file)

    def _load_from_file(self, config_file: Path):
        """Load additional config from JSON file."""
        try:
            with open(config_file, 'r', encoding='utf-8') as f:
                file_config = json.load(f)

            for key, value in file_config.items():
                if hasattr(self, key):
                    setattr(self, key, value)

            logger.info(f"Loaded configuration from {config_file}")
        except Exception as e:
            logger.warning(f"Could not load config file: {e}")

    def to_dict(self) -> dict:
        return {
            'seed': self.seed,
            'cover_budget': self.cover_budget,
            'max_hom_size': self.max_hom_size,
            'max_enum_opens': self.max_enum_opens,
            'enum_node_budget': self.enum_node_budget,
            'category_budget': self.category_budget,
            'max_points': self.max_points,
            'exhaustive_max_points': self.exhaustive_max_points,
            'exhaustive_max_arrows': self.exhaustive_max_arrows,
            'random_groupoids': self.random_groupoids,
            'random_max_arrows': self.random_max_arrows,
            'random_presheaves': self.random_presheaves,
            'enabled_suites': self.enabled_suites,
        }

    def save_to_file(self, config_file: str = './config.json'):
        """Save current config to JSON file."""
        with open(config_file, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2)

        logger.info(f"Saved configuration to {config_file}")

    def validate(self) -> List[str]:
        """Validate configuration and return list of issues."""
        issues = []

        for name in ('cover_budget', 'max_hom_size', 'max_enum_opens', 'enum_node_budget',
                     'category_budget', 'max_points', 'workers'):
            if getattr(self, name) <= 0:
                issues.append(f"{name.upper()} must be positive")

        unknown = [s for s in self.enabled_suites if s not in ALL_SUITES]
        if unknown:
            issues.append(f"Unknown suites: {', '.join(unknown)}")

        return issues


def _parse_list_env(key: str, default: List[str]) -> List[str]:
    """Parse comma-separated environment variable into list."""
    value = os.getenv(key, '')
    if value:
        return [item.strip() for item in value.split(',') if item.strip()]
    return default


# For testing
if __name__ == "__main__":
    config = Config()
    print("Current Configuration:")
    for key, value in config.to_dict().items():
        print(f"  {key}: {value}")

    issues = config.validate()
    if issues:
        print("\nConfiguration Issues:")
        for issue in issues:
            print(f"  ⚠ {issue}")

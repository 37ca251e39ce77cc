"""Version information for this package."""

### IMPORTS
### ============================================================================
## Standard Library
import importlib.metadata

## Installed

## Application

### CONSTANTS
### ============================================================================
## Version Information
## -----------------------------------------------------------------------------
try:
    PACKAGE_VERSION = importlib.metadata.version("rinkeffects")
except importlib.metadata.PackageNotFoundError:
    PACKAGE_VERSION = "0+unknown"

## Version Information Strings
## -----------------------------------------------------------------------------
VERSION_INFO_SHORT = PACKAGE_VERSION
VERSION_INFO = f"rinkeffects {PACKAGE_VERSION}"
VERSION_INFO_FULL = (
    f"rinkeffects {PACKAGE_VERSION}\n"
    "Rink effect estimation and adjustment for hockey play-by-play event counts"
)

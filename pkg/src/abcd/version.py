"""Single source for the tool version embedded in reports."""

VERSION = "0.1.0"

"""Test suite for the spectrum-market package."""

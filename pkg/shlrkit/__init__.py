from shlrkit.version import __version__

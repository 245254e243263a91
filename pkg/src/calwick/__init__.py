"""calwick: Calderon operators of Wick-rotated Laplacians and the
Klein-Gordon two-point functions they induce, verified per Fourier mode
against closed-form oracles on 1+1d analytic spacetimes."""

__version__ = "0.1.0"

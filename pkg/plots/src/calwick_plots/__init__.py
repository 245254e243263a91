"""Figure rendering for calwick CSV reports.

Consumes only the public CSV contract of the calwick CLI (header
`scenario,check,mode,param1,param2,value_re,value_im,residual`) and turns
it into deterministic raster figures.  No in-process linkage to the main
package.
"""

from .schema import SchemaError, load_csv
from .render import render

__all__ = ["SchemaError", "load_csv", "render"]

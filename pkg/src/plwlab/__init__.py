"""Desk-scale laboratory for p-adic Littlewood-type products.

Exact arithmetic substrates (p-adic, divisibility chains, quadratic
surds), record-minimum scans of the associated Diophantine products,
diagonal flows on lattices in R^2 x Qp^2 with shortest-vector heights,
and separated-set box-dimension estimators, all behind one CLI.
"""

from .padic import (DSeq, PAdicApprox, PrecisionError, ZInvP, ZeroNormError,
                    d_adic_norm, dist_nearest_int, padic_norm,
                    padic_valuation)
from .contfrac import (CFExpansion, NotIrrationalError, QuadIrr, cf_expand,
                       mt_liminf_witnesses_from_cf, scaled_quotient_sup)
from .diophantine import (Flavor, ProductQuery, Record, RecordSequence,
                          dadic_product, dadic_record_scan,
                          f_delta_invariance_check, furstenberg_product,
                          furstenberg_record_scan, gmt_product,
                          gmt_record_scan, mt_product, mt_record_scan,
                          reduction_check)

__version__ = "0.1.0"

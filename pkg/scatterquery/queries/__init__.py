from .initialization import (EMBED_DIM, QUERY_DIM, QUERY_FORMAT_VERSION, IndependenceReport, ScatteringQuery,
                             embed_pair, independence_report, init_query, load_queries, query_bank,
                             sample_pairs, save_queries, shipped_queries)

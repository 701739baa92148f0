#include <stdio.h>
#include <string.h>
#include "netctrl.h"

int main(void) {
    NcGraph *g = NULL;
    NcStatus st = nc_graph_parse("n 2\nleaders 1\ntargets 2\nedge 1 2 1\n", &g);
    if (st != NC_OK) { printf("parse failed: %s\n", nc_last_error()); return 1; }
    printf("nodes=%zu verdict=%d version=%s\n", nc_graph_node_count(g), nc_analyze_verdict(g), nc_version());
    char *json = NULL;
    st = nc_analyze_json(g, NULL, &json);
    if (st != NC_OK) return 2;
    printf("json starts: %.40s\n", json);
    nc_string_free(json);
    nc_graph_free(g);
    return 0;
}

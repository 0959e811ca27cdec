# Graphs module
